"""Topology of the leaves ``{x : s >= rho(x)}`` of the side above the manifold.

For a nondegenerate real quadratic form with ``k`` positive and ``l``
negative eigenvalues the answer depends only on ``(k, l)`` and the sign of
``s``; :func:`classify_quadric_leaf` encodes it.  :func:`sample_leaf` is an
independent brute-force check on a grid, used to validate the classifier and
to inspect perturbed models.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import GridBudgetExceeded, HypothesisError, ResolutionTooCoarse
from .quadric import Inertia, QuadricModel, inertia, real_form

__all__ = [
    "LeafTopology",
    "classify_quadric_leaf",
    "sample_leaf",
    "sample_real_leaf",
    "default_box",
    "MAX_CELLS",
]

#: default grid budget (cells); a 64^4 grid fits, a 64^5 grid does not
MAX_CELLS = 2**26


@dataclass(frozen=True)
class LeafTopology:
    components: int
    boundary_components: int
    pi1_rank: int = 0
    generator_on_boundary: bool = False
    empty: bool = False
    note: str = ""
    resolution: int | None = None
    boundary_cells: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.empty and (self.components or self.boundary_components or self.pi1_rank):
            raise ValueError("an empty leaf has no components")
        if self.pi1_rank == 1 and not self.generator_on_boundary:
            raise ValueError("a rank one fundamental group is generated on the boundary")

    def counts(self):
        return (self.components, self.boundary_components)

    def to_json(self):
        out = {
            "components": self.components,
            "boundary_components": self.boundary_components,
            "pi1_rank": self.pi1_rank,
            "generator_on_boundary": self.generator_on_boundary,
            "empty": self.empty,
            "note": self.note,
        }
        if self.resolution is not None:
            out["resolution"] = self.resolution
        return out


def classify_quadric_leaf(form_inertia: Inertia, s_sign: int) -> LeafTopology:
    """Topology of ``{Q <= s}`` from the inertia ``(k, l)`` of ``Q`` and the sign of ``s``."""
    k, l, zero = form_inertia
    if zero:
        raise HypothesisError("the real form is degenerate")
    if k < 2:
        raise HypothesisError("the real form needs at least two positive eigenvalues")
    s_sign = int(np.sign(s_sign))
    if s_sign > 0:
        return LeafTopology(1, 1, note="s > 0: connected, simply connected, connected boundary")
    if s_sign == 0:
        if l == 0:
            return LeafTopology(1, 0, note="s = 0 and Q positive definite: a single point")
        return LeafTopology(1, 1, note="s = 0: star shaped cone")
    if l == 0:
        return LeafTopology(0, 0, empty=True, note="s < 0 and Q positive definite: empty")
    if l == 1:
        return LeafTopology(2, 2, note="s < 0, l = 1: two simply connected components")
    if l == 2:
        return LeafTopology(
            1, 1, pi1_rank=1, generator_on_boundary=True,
            note="s < 0, l = 2: fundamental group Z generated by a circle in the boundary",
        )
    return LeafTopology(1, 1, note="s < 0, l >= 3: connected, simply connected, connected boundary")


def default_box(s: float) -> float:
    return 2.0 * np.sqrt(abs(s)) + 1.0


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------
class _Field:
    """Evaluates ``rho`` on axis-aligned slabs of the grid ``[-L, L]^m``."""

    def __init__(self, m, axis, C=None, model=None):
        self.m, self.axis, self.C, self.model = m, axis, C, model

    def _broadcast_coords(self, x0):
        m, r = self.m, len(self.axis)
        coords = [np.full((1,) * (m - 1), x0)]
        for j in range(1, m):
            shape = [1] * (m - 1)
            shape[j - 1] = r
            coords.append(self.axis.reshape(shape))
        return coords

    def slab(self, i):
        x = self._broadcast_coords(self.axis[i])
        shape = (len(self.axis),) * (self.m - 1)
        if self.C is not None:
            C = self.C
            out = np.zeros(shape)
            for a in range(self.m):
                if C[a, a]:
                    out = out + C[a, a] * x[a] ** 2
                for b in range(a + 1, self.m):
                    if C[a, b]:
                        out = out + 2 * C[a, b] * x[a] * x[b]
            return np.broadcast_to(out, shape)
        n = self.m // 2
        z = np.stack(
            [np.broadcast_to(x[j] + 1j * x[n + j], shape) for j in range(n)], axis=-1
        )
        return np.asarray(self.model.rho(z), dtype=float)


def _face_structure(d):
    return ndimage.generate_binary_structure(d, 1)


def _has_neighbor(mask, value, prev, nxt):
    """Cells with a face neighbor equal to ``value`` (in-slab shifts plus adjacent slabs)."""
    target = mask == value
    out = np.zeros(mask.shape, dtype=bool)
    for ax in range(mask.ndim):
        sl_a = [slice(None)] * mask.ndim
        sl_b = [slice(None)] * mask.ndim
        sl_a[ax] = slice(1, None)
        sl_b[ax] = slice(None, -1)
        out[tuple(sl_a)] |= target[tuple(sl_b)]
        out[tuple(sl_b)] |= target[tuple(sl_a)]
    for other in (prev, nxt):
        if other is not None:
            out |= other == value
    return out


class _StreamLabeler:
    """Connected components of a set given slab by slab (face connectivity)."""

    def __init__(self, d):
        self.structure = _face_structure(d) if d > 0 else None
        self.offset = 0
        self.prev = None
        self.edges = []

    def push(self, mask):
        if mask.ndim == 0:
            lab = np.array(1 if mask else 0)
            num = int(mask)
        else:
            lab, num = ndimage.label(mask, structure=self.structure)
        lab = np.where(lab > 0, lab + self.offset, 0)
        if self.prev is not None:
            both = (self.prev > 0) & (lab > 0)
            if both.any():
                code = np.unique(self.prev[both].astype(np.int64) * (1 << 32) + lab[both])
                self.edges.append(np.stack([code >> 32, code & 0xFFFFFFFF], axis=1))
        self.offset += num
        self.prev = lab

    def count(self):
        if self.offset == 0:
            return 0
        if self.edges:
            e = np.concatenate(self.edges) - 1
            g = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.offset, self.offset))
        else:
            g = coo_matrix((self.offset, self.offset))
        ncomp, _ = connected_components(g, directed=False)
        return int(ncomp)


def _count_grid(field_, s, r, return_cells=False, max_cells_out=200000):
    axis = field_.axis
    inside = [None, None, None]  # previous, current, next
    inner = _StreamLabeler(field_.m - 1)
    shell = _StreamLabeler(field_.m - 1)
    any_inside = False
    cells = []
    nxt = s >= field_.slab(0)
    for i in range(r):
        cur = nxt
        nxt = (s >= field_.slab(i + 1)) if i + 1 < r else None
        prev = inside[1]
        inside = [prev, cur, nxt]
        any_inside |= bool(cur.any())
        inner.push(cur)
        near_out = _has_neighbor(cur, False, None if prev is None else prev, nxt)
        near_in = _has_neighbor(cur, True, None if prev is None else prev, nxt)
        sh = (cur & near_out) | (~cur & near_in)
        shell.push(sh)
        if return_cells and sum(len(c) for c in cells) < max_cells_out:
            idx = np.argwhere(cur & near_out)
            if len(idx):
                pts = np.concatenate([np.full((len(idx), 1), axis[i]), axis[idx]], axis=1)
                cells.append(pts)
    comps = inner.count()
    bcomps = shell.count()
    out_cells = np.concatenate(cells)[:max_cells_out] if cells else np.zeros((0, field_.m))
    return any_inside, comps, bcomps, out_cells


def _slice_mask(C, s, dirs, L, r, rho=None):
    g = np.linspace(-L, L, r)
    grids = np.meshgrid(*([g] * len(dirs)), indexing="ij")
    pts = sum(gr[..., None] * d for gr, d in zip(grids, dirs))
    if C is not None:
        vals = np.einsum("...i,ij,...j->...", pts, C, pts)
    else:
        vals = rho(pts)
    return s >= vals


def _bounded_complement(mask):
    """Labels of complement components that avoid the array border."""
    lab, num = ndimage.label(~mask, structure=_face_structure(mask.ndim))
    border = set()
    for ax in range(mask.ndim):
        for idx in (0, -1):
            sl = [slice(None)] * mask.ndim
            sl[ax] = idx
            border.update(np.unique(lab[tuple(sl)]).tolist())
    return lab, [k for k in range(1, num + 1) if k not in border]


def _pi1_signature(C, s, L, r, rho=None, m=None):
    """Detect the annulus signature: a 2-plane hole that no third direction fills."""
    if C is not None:
        _, vecs = np.linalg.eigh(C)
        dirs = [vecs[:, i] for i in range(C.shape[0])]
    else:
        dirs = list(np.eye(m))
    r2 = max(r, 33)
    for i, j in combinations(range(len(dirs)), 2):
        mask2 = _slice_mask(C, s, [dirs[i], dirs[j]], L, r2, rho)
        lab2, holes = _bounded_complement(mask2)
        if not holes:
            continue
        hole_cells = np.argwhere(lab2 == holes[0])
        filled = False
        r3 = max(r // 2, 17) | 1
        for k in range(len(dirs)):
            if k in (i, j):
                continue
            mask3 = _slice_mask(C, s, [dirs[i], dirs[j], dirs[k]], L, r3, rho)
            lab3, bounded = _bounded_complement(mask3)
            # locate the hole in the middle plane of the 3d slice
            c2 = hole_cells[len(hole_cells) // 2] * (r3 - 1) / (r2 - 1)
            cell = (int(round(c2[0])), int(round(c2[1])), (r3 - 1) // 2)
            if mask3[cell]:
                continue
            if lab3[cell] in bounded:
                filled = True
                break
        if not filled:
            return 1
    return 0


def _oracle(field_, s, L, r, C, rho, check_stability, max_cells, return_cells):
    m = field_.m
    total = float(r) ** m
    if total > max_cells:
        raise GridBudgetExceeded(
            f"grid of {r}^{m} = {total:.3g} cells exceeds the budget of {max_cells:.3g}",
            cells=total, budget=max_cells,
        )
    any_inside, comps, bcomps, cells = _count_grid(field_, s, r, return_cells)
    if not any_inside:
        return LeafTopology(0, 0, empty=True, note="no grid cell inside", resolution=r)
    if check_stability:
        r2 = 2 * r
        if float(r2) ** m > max_cells:
            raise GridBudgetExceeded("stability check grid exceeds the budget", cells=float(r2) ** m)
        f2 = _Field(m, np.linspace(-L, L, r2), C=field_.C, model=field_.model)
        _, c2, b2, _ = _count_grid(f2, s, r2)
        if (c2, b2) != (comps, bcomps):
            raise ResolutionTooCoarse(
                f"counts change from {(comps, bcomps)} at {r} to {(c2, b2)} at {r2}",
                coarse=[comps, bcomps], fine=[c2, b2],
            )
    pi1 = _pi1_signature(C, s, L, r, rho, m) if comps == 1 else 0
    return LeafTopology(
        comps, bcomps, pi1_rank=pi1, generator_on_boundary=bool(pi1),
        note="grid oracle", resolution=r,
        boundary_cells=cells if return_cells else None,
    )


def sample_real_leaf(C, s: float, *, box: float | None = None, resolution: int = 64,
                     check_stability: bool = False, max_cells: float = MAX_CELLS,
                     return_cells: bool = False) -> LeafTopology:
    """Grid oracle for ``{x in R^m : s >= x^t C x}`` with ``C`` real symmetric."""
    C = np.asarray(C, dtype=float)
    if resolution < 17:
        raise ValueError("resolution must be at least 17")
    L = default_box(s) if box is None else float(box)
    field_ = _Field(C.shape[0], np.linspace(-L, L, resolution), C=C)
    return _oracle(field_, s, L, resolution, C, None, check_stability, max_cells, return_cells)


def sample_leaf(model, s: float, *, box: float | None = None, resolution: int = 64,
                check_stability: bool = False, max_cells: float = MAX_CELLS,
                return_cells: bool = False) -> LeafTopology:
    """Grid oracle for the leaf ``{z : s >= rho(z)}`` of a model.

    Cells are grouped by face adjacency; boundary components are the
    components of the two-layer shell of cells on either side of the
    boundary.  Coordinates are ``(Re z, Im z)`` on ``[-L, L]^{2n}``.
    """
    if resolution < 17:
        raise ValueError("resolution must be at least 17")
    if isinstance(model, QuadricModel) and model.is_pure:
        return sample_real_leaf(real_form(model), s, box=box, resolution=resolution,
                                check_stability=check_stability, max_cells=max_cells,
                                return_cells=return_cells)
    n = model.n
    m = 2 * n
    L = default_box(s) if box is None else float(box)
    field_ = _Field(m, np.linspace(-L, L, resolution), model=model)

    def rho(x):
        return model.rho(x[..., :n] + 1j * x[..., n:])

    return _oracle(field_, s, L, resolution, None, rho, check_stability, max_cells, return_cells)


def quadric_leaf_inertia(model: QuadricModel) -> Inertia:
    """Inertia ``(k, l, 0)`` of the real form, the input of :func:`classify_quadric_leaf`."""
    return inertia(real_form(model))
