"""Affine analytic discs attached to ``s = rho(z)`` and rational leaves.

A disc through ``(z0, s)`` is the complex line ``xi -> z0 + d xi`` at fixed
``s``; the part where ``rho < s`` is a planar region whose boundary lies on
the manifold.  With ``d`` an elliptic direction (``d^t B d = 0`` and
``d^* A d = 1``) the restriction of the quadric is ``|xi + conj(p)|^2 - R``
and the region is a round disc.  Higher order terms are handled by radial
root finding from an interior point.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchError,
    ContinuationStuck,
    CurveNotClosed,
    EmptyDisc,
    EmptyLeaf,
    SingularityHit,
    TransversalityFail,
)
from .quadric import QuadricModel, block_reduce_B

__all__ = [
    "DEFAULT_NODES",
    "elliptic_direction",
    "neighborhood_radius",
    "Contour",
    "AffineDisc",
    "DiscGeometry",
    "disc_geometry",
    "disc_through",
    "line_disc",
    "transversal_perturb",
    "DiscFamily",
    "shrink_family",
    "RationalLeaf",
    "rational_leaf",
    "continue_rational_leaf",
    "default_seed",
]

DEFAULT_NODES = 256
ROOT_TOL = 1e-12


def default_seed(seed=None) -> int:
    if seed is not None:
        return int(seed)
    return int(os.environ.get("CREXT_SEED", "0"))


def elliptic_direction(lam1: float, lam2: float, variant: int = 0):
    """Unit ``(c1, c2)`` with ``lam1 c1^2 + lam2 c2^2 = 0``.

    ``variant=1`` returns the other canonical solution (the conjugate
    direction, or ``(0, 1)`` when both invariants vanish).
    """
    lam1, lam2 = float(lam1), float(lam2)
    if lam1 < 0 or lam2 < 0:
        raise ValueError("invariants must be nonnegative")
    tot = lam1 + lam2
    if tot == 0:
        return (1.0 + 0j, 0j) if variant == 0 else (0j, 1.0 + 0j)
    sign = 1.0 if variant == 0 else -1.0
    return (complex(np.sqrt(lam2 / tot)), sign * 1j * np.sqrt(lam1 / tot))


def neighborhood_radius(model, r0: float = 1.0, samples: int = 2048, seed: int = 0, halvings: int = 40):
    """Largest ``r0 / 2^k`` with ``|E(z)| <= |z|^2 / 2`` on random samples of ``|z| <= r``."""
    E = getattr(model, "E", None)
    if E is None:
        return r0
    rng = np.random.default_rng(seed)
    n = model.n
    g = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.random(samples) ** (1.0 / (2 * n))
    r = r0
    for _ in range(halvings + 1):
        z = g * (r * u)[:, None]
        if np.all(np.abs(np.real(E(z))) <= 0.5 * np.sum(np.abs(z) ** 2, axis=1) + 1e-300):
            return r
        r *= 0.5
    return r


# ---------------------------------------------------------------------------
# radial root finding
# ---------------------------------------------------------------------------
def _bisect(fr, a, b, iters=60):
    """Vectorized root of ``fr(r)`` with ``fr(a) < 0 <= fr(b)`` elementwise, plus Newton polish."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = fr(m)
        inside = fm < 0
        a = np.where(inside, m, a)
        b = np.where(inside, b, m)
        if np.all(np.abs(b - a) <= ROOT_TOL * 1e-3 * np.maximum(1.0, np.abs(a))):
            break
    r = 0.5 * (a + b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    # Newton polish guarded by the bracket; inf values (outside a cut) just reject the step
    with np.errstate(invalid="ignore", divide="ignore"):
        for _ in range(2):
            h = 1e-7 * np.maximum(np.abs(r), 1e-3)
            f0 = fr(r)
            df = (fr(r + h) - fr(r - h)) / (2 * h)
            ok = np.isfinite(df) & (np.abs(df) > 0)
            step = np.where(ok, f0 / np.where(ok, df, 1.0), 0.0)
            cand = r - step
            good = (cand > 0) & (cand >= lo) & (cand <= hi) & (np.abs(fr(cand)) <= np.abs(f0))
            r = np.where(good, cand, r)
    return r


def _spectral_derivative(r):
    K = len(r)
    k = np.fft.fftfreq(K, d=1.0 / K)
    if K % 2 == 0:
        k[K // 2] = 0.0
    return np.real(np.fft.ifft(1j * k * np.fft.fft(r)))


@dataclass(frozen=True)
class Contour:
    """Closed contour ``tau(theta_k)`` with derivative ``dtau/dtheta`` at ``K`` equispaced angles."""

    tau: np.ndarray
    dtau: np.ndarray

    @property
    def K(self):
        return len(self.tau)

    @property
    def spacing(self):
        return float(np.abs(np.diff(np.append(self.tau, self.tau[0]))).max())

    def winding_number(self, point) -> int:
        ang = np.unwrap(np.angle(np.append(self.tau, self.tau[0]) - point))
        return int(round((ang[-1] - ang[0]) / (2 * np.pi)))


def _trace_star(h, origin, K, r_hi, nscan=64):
    """Radii of the first crossing ``h >= 0`` along ``K`` rays from ``origin``.

    ``h`` maps complex parameters (any shape) to real values, negative inside.
    Returns ``(theta, radii, reentries)``.
    """
    theta = 2 * np.pi * np.arange(K) / K
    e = np.exp(1j * theta)
    grid = r_hi * np.arange(1, nscan + 1) / nscan
    vals = h(origin + grid[None, :] * e[:, None])
    out = vals >= 0
    if not np.all(out.any(axis=1)):
        bad = int((~out.any(axis=1)).sum())
        raise CurveNotClosed(f"no boundary crossing on {bad} of {K} rays", rays=bad)
    first = np.argmax(out, axis=1)
    a = np.where(first > 0, grid[np.maximum(first - 1, 0)], 0.0)
    b = grid[first]
    reentry = int(
        sum(np.any(vals[i, first[i]:] < 0) for i in range(K))
    )

    def fr(r):
        return h(origin + r * e)

    radii = _bisect(fr, a, b)
    return theta, radii, reentry


# ---------------------------------------------------------------------------
# discs
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DiscGeometry:
    """Quadric restricted to the line: ``a |xi|^2 + 2 Re(p xi) + 2 Re(alpha xi^2) + q0``.

    For an elliptic direction (``alpha = 0``, ``a = 1``) the region
    ``r < s`` is the disc with center ``-conj(p)`` and squared radius
    ``s + R`` where ``R = |p|^2 - q0``.
    """

    p: complex
    a: float
    alpha: complex
    q0: float
    s: float

    @property
    def center_offset(self) -> complex:
        return -np.conj(self.p) / self.a

    @property
    def R(self) -> float:
        return float(abs(self.p) ** 2 / self.a - self.q0)

    @property
    def radius_sq(self) -> float:
        return float((self.s - self.q0) / self.a + abs(self.p) ** 2 / self.a**2)

    @property
    def is_round(self) -> bool:
        return abs(self.alpha) <= 1e-13 * max(1.0, self.a)


def disc_geometry(model: QuadricModel, z0, s, d) -> DiscGeometry:
    A, B = model.A, model.B
    z0 = np.asarray(z0, dtype=complex)
    d = np.asarray(d, dtype=complex)
    p = complex(z0.conj() @ A @ d + 2 * (z0 @ B @ d))
    a = float(np.real(d.conj() @ A @ d))
    alpha = complex(d @ B @ d)
    q0 = float(model.q(z0))
    return DiscGeometry(p, a, alpha, q0, float(s))


@dataclass(eq=False)
class AffineDisc:
    """The attached disc ``L(xi) = (z0 + d xi, s)``.

    ``c`` holds the direction in block reduced coordinates (first two
    components) and ``transform`` the reducing matrix, so ``d = T[:, :2] c``.
    """

    model: object
    z0: np.ndarray
    s: float
    d: np.ndarray
    c: tuple | None = None
    transform: np.ndarray | None = None
    lambdas: tuple = ()
    trace: bool = False
    K: int = DEFAULT_NODES
    geometry: DiscGeometry | None = None
    origin: complex = 0j
    boundary_residual: float = float("nan")
    grad_min: float = float("nan")
    min_singular_distance: float = float("nan")
    reentries: int = 0
    _contours: dict = field(default_factory=dict, repr=False)

    @property
    def exact(self) -> bool:
        g = self.geometry
        return (
            not self.trace
            and isinstance(self.model, QuadricModel)
            and self.model.is_pure
            and g is not None
            and g.is_round
            and g.a > 0
        )

    @property
    def center(self) -> complex:
        return self.geometry.center_offset if self.geometry is not None else self.origin

    @property
    def radius_sq(self) -> float:
        return self.geometry.radius_sq if self.geometry is not None else float("nan")

    def L(self, xi):
        """Points of ``C^n`` on the line (shape ``xi.shape + (n,)``)."""
        xi = np.asarray(xi, dtype=complex)
        return self.z0 + xi[..., None] * self.d

    def r(self, xi):
        """Defining function pulled back to the line."""
        return self.model.rho(self.L(xi))

    def contour(self, K: int | None = None) -> Contour:
        K = self.K if K is None else int(K)
        if K in self._contours:
            return self._contours[K]
        if self.exact:
            R = np.sqrt(self.radius_sq)
            e = np.exp(2j * np.pi * np.arange(K) / K)
            ct = Contour(self.center + R * e, 1j * R * e)
        else:
            scale = abs(self.origin - self.center) + np.sqrt(abs(self.radius_sq)) if self.geometry else 1.0
            r_hi = 3.0 * scale + 1e-3
            theta, radii, reentry = _trace_star(lambda xi: self.r(xi) - self.s, self.origin, K, r_hi)
            self.reentries = max(self.reentries, reentry)
            e = np.exp(1j * theta)
            ct = Contour(self.origin + radii * e, (_spectral_derivative(radii) + 1j * radii) * e)
        self._contours[K] = ct
        return ct

    def boundary_points(self, K: int | None = None):
        return self.L(self.contour(K).tau)

    def to_json(self):
        return {
            "base": {"z": [[float(v.real), float(v.imag)] for v in self.z0], "s": self.s},
            "direction": [[float(v.real), float(v.imag)] for v in self.d],
            "center": [float(np.real(self.center)), float(np.imag(self.center))],
            "radius_sq": self.radius_sq,
            "exact_circle": self.exact,
            "boundary_residual": self.boundary_residual,
            "grad_min": self.grad_min,
            "min_singular_distance": self.min_singular_distance,
        }


def _find_inside(h, center, scale):
    cands = [center, 0j]
    for c in cands:
        if h(np.array([c]))[0] < 0:
            return c
    g = np.linspace(-2 * scale, 2 * scale, 41)
    X, Y = np.meshgrid(g, g)
    pts = center + X + 1j * Y
    vals = h(pts)
    i = np.unravel_index(np.argmin(vals), vals.shape)
    if vals[i] < 0:
        return complex(pts[i])
    return None


def _certify(disc: AffineDisc, sing_tol: float):
    ct = disc.contour()
    pts = disc.L(ct.tau)
    disc.boundary_residual = float(np.abs(disc.model.rho(pts) - disc.s).max())
    disc.min_singular_distance = float(
        np.sqrt(np.sum(np.abs(pts) ** 2, axis=-1) + disc.s**2).min()
    )
    if disc.exact:
        disc.grad_min = 2.0 * np.sqrt(disc.radius_sq) * disc.geometry.a
    else:
        h = 1e-6 * max(1.0, float(np.abs(ct.tau).max()))
        gx = (disc.r(ct.tau + h) - disc.r(ct.tau - h)) / (2 * h)
        gy = (disc.r(ct.tau + 1j * h) - disc.r(ct.tau - 1j * h)) / (2 * h)
        disc.grad_min = float(np.sqrt(gx**2 + gy**2).min())
    if disc.min_singular_distance < sing_tol:
        raise SingularityHit(
            f"disc boundary passes within {disc.min_singular_distance:.3e} of the CR singular point",
            distance=disc.min_singular_distance,
        )
    return disc


def line_disc(
    model,
    z0,
    s: float,
    d,
    *,
    c=None,
    transform=None,
    lambdas=(),
    K: int = DEFAULT_NODES,
    trace: bool = False,
    sing_tol: float = 1e-10,
) -> AffineDisc:
    """Disc on the line ``z0 + d xi`` at level ``s``; the base need not lie inside.

    Raises :class:`EmptyDisc` when ``rho < s`` nowhere near the line's
    quadric minimum.
    """
    z0 = np.asarray(z0, dtype=complex)
    d = np.asarray(d, dtype=complex)
    quad = model.quadric() if isinstance(model, QuadricModel) else None
    geom = disc_geometry(quad, z0, s, d) if quad is not None else None
    disc = AffineDisc(model, z0, float(s), d, c, transform, tuple(lambdas), trace, K, geom)
    if disc.exact:
        if geom.radius_sq <= 0:
            raise EmptyDisc(f"disc is empty (radius_sq = {geom.radius_sq:.3e})", radius_sq=geom.radius_sq)
        disc.origin = geom.center_offset
    else:
        def h(xi):
            return disc.r(xi) - s

        center = geom.center_offset if geom is not None and geom.a > 0 else 0j
        scale = np.sqrt(abs(geom.radius_sq)) if geom is not None else 1.0
        o = _find_inside(h, center, max(scale, 1e-6))
        if o is None:
            raise EmptyDisc("no point of the line lies strictly inside the side",
                            radius_sq=None if geom is None else geom.radius_sq)
        disc.origin = o
    return _certify(disc, sing_tol)


def disc_through(
    point,
    model,
    *,
    variant: int = 0,
    K: int = DEFAULT_NODES,
    trace: bool = False,
    sing_tol: float = 1e-10,
) -> AffineDisc:
    """Attached disc with ``L(0) = (z, s)`` in an elliptic direction.

    ``point`` is ``(z, s)`` with ``s > rho(z)``.  The direction comes from the
    block reduction of the quadric part, so ``A`` needs two positive
    eigenvalues.
    """
    z, s = point
    z = np.asarray(z, dtype=complex)
    s = float(s)
    if not s > float(model.rho(z)):
        raise EmptyDisc("point is not strictly inside the side s > rho", radius_sq=0.0)
    quad = model.quadric()
    nf = block_reduce_B(quad)
    c = elliptic_direction(nf.lambdas[0], nf.lambdas[1], variant)
    d = nf.transform[:, :2] @ np.array(c)
    return line_disc(model, z, s, d, c=c, transform=nf.transform, lambdas=nf.lambdas,
                     K=K, trace=trace, sing_tol=sing_tol)


def transversal_perturb(
    disc: AffineDisc,
    eps: float = 1e-3,
    *,
    grad_tol: float = 1e-6,
    max_retries: int = 8,
    seed: int | None = None,
) -> AffineDisc:
    """Return ``disc`` if its boundary is transversal, else jitter the direction.

    Only the first two reduced components of the direction move (by at most
    ``eps``); the jitter sequence is deterministic for a given seed.
    """
    if np.isfinite(disc.grad_min) and disc.grad_min > grad_tol:
        return disc
    if disc.c is None or disc.transform is None:
        raise TransversalityFail("disc has no reduced direction to perturb")
    rng = np.random.default_rng(default_seed(seed))
    c0 = np.array(disc.c, dtype=complex)
    for attempt in range(max_retries):
        delta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        delta *= eps * rng.random() / np.linalg.norm(delta)
        c = c0 + delta
        c /= np.linalg.norm(c)
        d = disc.transform[:, :2] @ c
        try:
            cand = line_disc(disc.model, disc.z0, disc.s, d, c=tuple(c), transform=disc.transform,
                             lambdas=disc.lambdas, K=disc.K, trace=True)
        except (EmptyDisc, CurveNotClosed, SingularityHit):
            continue
        if cand.grad_min > grad_tol:
            return cand
    raise TransversalityFail(
        f"no transversal direction found after {max_retries} jitters", attempts=max_retries
    )


@dataclass
class DiscFamily:
    """Discs ``L_t`` with base ``t z0`` for ``t`` from 1 down to ``t_end``."""

    discs: list
    ts: list
    end: str  # "empty" or "origin"
    t_end: float

    def to_json(self):
        return {
            "end": self.end,
            "t_end": self.t_end,
            "steps": [{"t": t, "radius_sq": d.radius_sq} for t, d in zip(self.ts, self.discs)],
        }


def shrink_family(disc: AffineDisc, steps: int = 32) -> DiscFamily:
    """Replace the base ``z0`` by ``t z0`` for ``t = 1 -> 0`` keeping direction and level."""
    discs, ts = [disc], [1.0]
    for t in np.linspace(1.0, 0.0, steps + 1)[1:]:
        try:
            dt = line_disc(disc.model, t * disc.z0, disc.s, disc.d, c=disc.c, transform=disc.transform,
                           lambdas=disc.lambdas, K=disc.K, trace=disc.trace)
        except (EmptyDisc, CurveNotClosed):
            return DiscFamily(discs, ts, "empty", float(t))
        discs.append(dt)
        ts.append(float(t))
    return DiscFamily(discs, ts, "origin", 0.0)


# ---------------------------------------------------------------------------
# rational leaves
# ---------------------------------------------------------------------------
@dataclass(eq=False)
class RationalLeaf:
    """The conic ``X_t = {lam1 w1^2 + lam2 w2^2 = t}`` in reduced coordinates and its part ``Y_t``.

    ``phi(xi)`` parametrizes ``X_t`` by ``C \\ {0}``; ``Y_t`` is where
    ``rho < s``.  When every ray from 0 meets ``Y_t`` the region is an
    annulus bounded by ``inner`` and ``outer`` contours.
    """

    t: complex
    lambdas: tuple
    model: object
    s: float
    transform: np.ndarray
    K: int = DEFAULT_NODES
    valid: np.ndarray | None = None
    radius: float = np.inf  # points of the conic farther out are treated as outside
    nscan: int = 400
    _contours: dict = field(default_factory=dict, repr=False)

    def phi_reduced(self, xi):
        xi = np.asarray(xi, dtype=complex)
        l1, l2 = self.lambdas
        w1 = (xi + self.t / xi) / (2 * np.sqrt(l1))
        w2 = (xi - self.t / xi) / (2j * np.sqrt(l2))
        return w1, w2

    def phi(self, xi):
        w1, w2 = self.phi_reduced(xi)
        return w1[..., None] * self.transform[:, 0] + w2[..., None] * self.transform[:, 1]

    def inverse(self, z):
        w = np.linalg.solve(self.transform, np.asarray(z, dtype=complex))
        l1, l2 = self.lambdas
        return complex(np.sqrt(l1) * w[0] + 1j * np.sqrt(l2) * w[1])

    def g_residual(self, xi) -> float:
        w1, w2 = self.phi_reduced(xi)
        l1, l2 = self.lambdas
        return float(np.abs(l1 * w1**2 + l2 * w2**2 - self.t).max())

    def h(self, xi):
        z = self.phi(xi)
        out = self.model.rho(z) - self.s
        if np.isfinite(self.radius):
            out = np.where(np.linalg.norm(z, axis=-1) <= self.radius, out, np.inf)
        return out

    def contains(self, xi):
        return self.h(xi) < 0

    def _scan(self, K, nscan=None):
        nscan = self.nscan if nscan is None else nscan
        theta = 2 * np.pi * np.arange(K) / K
        x_mid = 0.5 * np.log(abs(self.t))
        xs = x_mid + np.linspace(-12.0, 12.0, nscan)
        e = np.exp(1j * theta)
        vals = self.h(np.exp(xs)[None, :] * e[:, None])
        return theta, xs, e, vals

    @property
    def is_annulus(self) -> bool:
        return bool(self.valid is not None and self.valid.all())

    def boundaries(self, K: int | None = None):
        """``(outer, inner)`` contours of an annular ``Y_t``."""
        K = self.K if K is None else int(K)
        if K in self._contours:
            return self._contours[K]
        theta, xs, e, vals = self._scan(K)
        imin = np.argmin(vals, axis=1)
        if not np.all(vals[np.arange(K), imin] < 0):
            raise BranchError("Y_t is not an annulus around the puncture")
        if np.any(imin == 0) or np.any(vals[:, 0] < 0):
            raise BranchError("inner boundary not bracketed away from the puncture")
        rmin = np.exp(xs[imin])

        def fr(r):
            return self.h(r * e)

        inner = _bisect(fr, rmin, np.full(K, np.exp(xs[0])))
        if np.any(inner < 1e-8):
            raise BranchError("inner boundary collapses onto the puncture")
        outer = _bisect(fr, rmin, np.full(K, np.exp(xs[-1])))
        # a bracket closed by the neighborhood cut is not a boundary on the manifold
        for r in (inner, outer):
            if not np.all(np.isfinite(self.h(r * e))):
                raise BranchError("Y_t reaches the edge of the neighborhood")
        out = (
            Contour(outer * e, (_spectral_derivative(outer) + 1j * outer) * e),
            Contour(inner * e, (_spectral_derivative(inner) + 1j * inner) * e),
        )
        self._contours[K] = out
        return out

    def mid_contour(self, K: int | None = None):
        """Nodes ``sqrt(r_in r_out) e^{i theta}`` on the rays that meet ``Y_t``."""
        K = self.K if K is None else int(K)
        theta, xs, e, vals = self._scan(K)
        inside = vals < 0
        ok = inside.any(axis=1)
        xm = np.array([xs[row].mean() if row.any() else np.nan for row in inside])
        return np.exp(xm[ok]) * e[ok]


def rational_leaf(t, lambdas, model, s, transform=None, K: int = DEFAULT_NODES,
                  nscan: int = 400) -> RationalLeaf:
    """Build the rational leaf for ``t != 0`` and ``lam1, lam2 > 0``.

    Raises :class:`EmptyLeaf` when ``Y_t`` has no point on the sampling grid.
    """
    t = complex(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    l1, l2 = float(lambdas[0]), float(lambdas[1])
    if l1 <= 0 or l2 <= 0:
        raise ValueError("both invariants must be positive")
    n = model.n
    if transform is None:
        transform = np.eye(n, dtype=complex)
    radius = np.inf
    if getattr(model, "E", None) is not None:
        cache = getattr(model, "_cache", {})
        if "neighborhood_radius" not in cache:
            cache["neighborhood_radius"] = neighborhood_radius(model)
        radius = cache["neighborhood_radius"]
    leaf = RationalLeaf(t, (l1, l2), model, float(s), np.asarray(transform, dtype=complex), K,
                        radius=radius, nscan=nscan)
    theta, xs, e, vals = leaf._scan(K)
    inside = vals < 0
    if not inside.any():
        raise EmptyLeaf(f"Y_t is empty for t = {t:.6g}", t=[t.real, t.imag])
    leaf.valid = inside.any(axis=1)
    return leaf


def continue_rational_leaf(model, s, t0, lambdas, transform, *, max_halvings: int = 12,
                           K: int = 128, h0: float = 0.05, nscan: int = 200):
    """Walk ``t`` from the empty end (large ``Re t``) straight to ``t0``.

    A step ``t -> t'`` is accepted when one contour lies inside both
    regions: the mid contour of ``Y_t`` (which lies in ``Y_t``), rescaled by
    ``sqrt(t'/t)`` to follow the natural size of the conic, must lie inside
    ``Y_t'``.  Returns the list of accepted ``t``.
    """
    t0 = complex(t0)
    # Y_t is empty once s - 2 Re t <= 0 (for |E| <= |z|^2 / 2)
    t_far = complex(max(0.5 * s, t0.real) + 1e-12, t0.imag)

    def nonempty(t):
        try:
            rational_leaf(t, lambdas, model, s, transform, K, nscan)
            return True
        except EmptyLeaf:
            return False

    if not nonempty(t0):
        raise EmptyLeaf("target leaf is empty")
    lo, hi = 0.0, 1.0  # fraction along t_far -> t0; hi is nonempty
    for _ in range(64):
        if not nonempty(t_far):
            break
        t_far += max(s, 1e-3)
    else:
        raise ContinuationStuck("no empty leaf found along Re t", last_good=[t0.real, t0.imag])
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        if nonempty(t_far + mid * (t0 - t_far)):
            hi = mid
        else:
            lo = mid
    path = [t_far + hi * (t0 - t_far)]
    sigma, h = hi, h0
    prev = rational_leaf(path[0], lambdas, model, s, transform, K, nscan)
    while sigma < 1.0:
        nxt_sigma = min(1.0, sigma + h)
        t = t_far + nxt_sigma * (t0 - t_far)
        ok = False
        try:
            cur = rational_leaf(t, lambdas, model, s, transform, K, nscan)
            # the shared contour is the previous mid contour carried along xi ~ sqrt(t)
            gamma = prev.mid_contour() * np.sqrt(t / prev.t)
            ok = bool(len(gamma) and cur.contains(gamma).all())
        except EmptyLeaf:
            ok = False
        if ok:
            path.append(t)
            sigma, prev = nxt_sigma, cur
            h = min(h0, 2 * h)
        else:
            h *= 0.5
            if h < h0 * 2.0 ** (-max_halvings):
                raise ContinuationStuck(f"t-path stalled at t = {path[-1]:.6g}",
                                        last_good=[path[-1].real, path[-1].imag])
    return path
