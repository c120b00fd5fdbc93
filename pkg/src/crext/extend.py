"""Numeric CR extension by Cauchy integrals along attached discs and rational leaves.

Boundary data is any function of ``(z, s)`` that is evaluated only at points
of the manifold.  The value of the extension at ``(z, s)`` comes from the
Cauchy formula on a disc (or annular rational leaf) through the point; the
chain of discs used to justify the continuation is recorded alongside.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .discs import (
    DEFAULT_NODES,
    AffineDisc,
    Contour,
    continue_rational_leaf,
    disc_through,
    line_disc,
    rational_leaf,
    shrink_family,
    transversal_perturb,
)
from .errors import BranchError, ContinuationStuck, EmptyLeaf, NodeInsufficient, VerdictForbids
from .expr import Expression
from .poly import CPolynomial, SPolynomial
from .quadric import QuadricModel, block_reduce_B, extension_verdict

__all__ = [
    "EST_TOL",
    "W_FACTOR",
    "BoundaryData",
    "CauchyValue",
    "ExtensionResult",
    "cauchy_sum",
    "cauchy_eval",
    "annulus_cauchy",
    "leafwise_lewy",
    "extend_at_point",
    "DivergenceReport",
    "divergence_along",
    "verify_nonextension",
    "open_arc_cauchy",
]

EST_TOL = 1e-8
W_FACTOR = 0.2
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class BoundaryData:
    """Function ``evaluator(z, s)`` of points of the manifold (``z`` has shape ``(..., n)``)."""

    evaluator: Callable
    kind: str = "closed-form"
    label: str = ""

    def __call__(self, z, s):
        z = np.asarray(z, dtype=complex)
        s = np.broadcast_to(np.asarray(s, dtype=float), z.shape[:-1])
        out = np.asarray(self.evaluator(z, s), dtype=complex)
        out = np.broadcast_to(out, z.shape[:-1])
        if not np.all(np.isfinite(out)):
            from .errors import DataDomainError

            raise DataDomainError(f"boundary data {self.label or self.kind} is not finite")
        return out

    @classmethod
    def from_spolynomial(cls, F: SPolynomial, label="F(z, s)"):
        return cls(lambda z, s: F(z, s), "closed-form", label)

    @classmethod
    def from_cpolynomial(cls, f: CPolynomial, label="f(z, zbar)"):
        return cls(lambda z, s: f(z), "closed-form", label)

    @classmethod
    def from_expression(cls, source: str, n: int):
        ex = Expression(source, n)
        return cls(lambda z, s: ex(z, s), "closed-form", source)

    @classmethod
    def constant(cls, c):
        c = complex(c)
        return cls(lambda z, s: np.full(np.shape(z)[:-1], c), "closed-form", f"{c}")

    def flipped(self) -> "BoundaryData":
        """The same data seen through ``s -> -s``."""
        return BoundaryData(lambda z, s: self.evaluator(z, -np.asarray(s)), self.kind, self.label)


@dataclass(frozen=True)
class CauchyValue:
    value: complex
    est_error: float
    K: int


@dataclass
class ExtensionResult:
    value: complex
    est_error: float
    chain: list = field(default_factory=list)
    method: str = "direct"

    def to_json(self):
        return {
            "value": [float(np.real(self.value)), float(np.imag(self.value))],
            "est_error": float(self.est_error),
            "method": self.method,
            "chain": self.chain,
        }


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------
def cauchy_sum(f_vals, ct: Contour, xi) -> tuple[complex, float]:
    """Trapezoid rule for ``(1/2 pi i) int f / (tau - xi) dtau`` and its roundoff floor."""
    w = ct.dtau / (ct.tau - xi)
    terms = f_vals * w
    val = complex(terms.sum() / (1j * ct.K))
    floor = 10 * _EPS * float(np.abs(terms).sum()) / ct.K
    return val, floor


def _check_interior(ct: Contour, xi):
    if ct.winding_number(xi) != 1:
        raise ValueError("evaluation parameter is not inside the contour")
    dist = float(np.abs(ct.tau - xi).min())
    if dist <= ct.spacing:
        raise ValueError(
            f"evaluation parameter is within one node spacing of the contour ({dist:.3e})"
        )


def cauchy_eval(data: BoundaryData, disc: AffineDisc, xi=0.0, *, K: int | None = None,
                est_tol: float = EST_TOL) -> CauchyValue:
    """Cauchy integral over the disc boundary at the interior parameter ``xi``.

    Returns the ``K``-node value; the error estimate is the change under node
    doubling plus a roundoff floor.
    """
    K = disc.K if K is None else int(K)
    xi = complex(xi)
    vals = []
    floor = 0.0
    for k in (K, 2 * K):
        ct = disc.contour(k)
        if k == K:
            _check_interior(ct, xi)
        v, fl = cauchy_sum(data(disc.L(ct.tau), disc.s), ct, xi)
        vals.append(v)
        floor = max(floor, fl)
    err = abs(vals[0] - vals[1]) + floor
    if err > est_tol:
        raise NodeInsufficient(f"node doubling changes the value by {err:.3e}", est_error=err, K=K)
    return CauchyValue(vals[0], err, K)


def annulus_cauchy(data: BoundaryData, leaf, xi, *, K: int | None = None,
                   est_tol: float = EST_TOL) -> CauchyValue:
    """Cauchy formula on an annular rational leaf: outer minus inner contour."""
    K = leaf.K if K is None else int(K)
    xi = complex(xi)
    vals, floor = [], 0.0
    for k in (K, 2 * K):
        outer, inner = leaf.boundaries(k)
        if k == K:
            if outer.winding_number(xi) != 1 or inner.winding_number(xi) != 0:
                raise ValueError("evaluation parameter is not inside the annulus")
        vo, fo = cauchy_sum(data(leaf.phi(outer.tau), leaf.s), outer, xi)
        vi, fi = cauchy_sum(data(leaf.phi(inner.tau), leaf.s), inner, xi)
        vals.append(vo - vi)
        floor = max(floor, fo + fi)
    err = abs(vals[0] - vals[1]) + floor
    if err > est_tol:
        raise NodeInsufficient(f"node doubling changes the value by {err:.3e}", est_error=err, K=K)
    return CauchyValue(vals[0], err, K)


# ---------------------------------------------------------------------------
# extension
# ---------------------------------------------------------------------------
def _disc_record(disc: AffineDisc, cv: CauchyValue | None = None, **extra):
    rec = {"step": "disc"}
    rec.update(disc.to_json())
    if cv is not None:
        rec["value"] = [float(cv.value.real), float(cv.value.imag)]
        rec["est_error"] = float(cv.est_error)
    rec.update(extra)
    return rec


def leafwise_lewy(data: BoundaryData, model, point, *, K: int = DEFAULT_NODES,
                  est_tol: float = EST_TOL) -> ExtensionResult:
    """Single disc extension with the maximum principle bound.

    The chain records ``|F - f(p_ref)| <= sup |f - f(p_ref)|`` where
    ``p_ref`` is the boundary node nearest to the point.
    """
    disc = disc_through(point, model, K=K)
    cv = cauchy_eval(data, disc, 0.0, est_tol=est_tol)
    ct = disc.contour()
    f = data(disc.L(ct.tau), disc.s)
    ref = int(np.argmin(np.abs(ct.tau)))
    bound = float(np.abs(f - f[ref]).max())
    rec = _disc_record(disc, cv, max_principle_bound=bound,
                       reference_value=[float(f[ref].real), float(f[ref].imag)])
    return ExtensionResult(cv.value, cv.est_error, [rec], "lewy")


def _disc_in_tube(disc: AffineDisc, factor: float) -> bool:
    ct = disc.contour()
    o = disc.origin
    pts = np.concatenate([o + r * (ct.tau - o) for r in (0.0, 0.25, 0.5, 0.75)])
    q = disc.L(pts)
    dist_M = np.abs(disc.s - disc.model.rho(q))
    dist_0 = np.sqrt(np.sum(np.abs(q) ** 2, axis=-1) + disc.s**2)
    return bool(np.all(dist_M <= factor * dist_0))


def extend_at_point(
    data: BoundaryData,
    model,
    point,
    *,
    K: int = DEFAULT_NODES,
    est_tol: float = EST_TOL,
    w_factor: float = W_FACTOR,
    variant: int = 0,
    steps: int = 16,
    seed: int | None = None,
    rational: bool = True,
) -> ExtensionResult:
    """Extend ``data`` to a point off the manifold.

    The side of the point must be allowed by the extension verdict.  The
    value is the Cauchy integral over an attached disc through the point; if
    the disc is not inside the tube ``W`` around the manifold the shrinking
    family ``L_t`` is recorded, and for ``s > 0`` points on the
    ``(w1, w2)``-plane whose family reaches the origin the annular rational
    leaf formula supplies the value.  ``variant`` selects the other elliptic
    direction (for path independence checks).
    """
    z, s = point
    z = np.asarray(z, dtype=complex)
    s = float(s)
    rho0 = float(model.rho(z))
    if s == rho0:
        raise ValueError("point lies on the manifold")
    side = "upper" if s > rho0 else "lower"
    verdict = extension_verdict(model.quadric())
    if not verdict.q_nondegenerate:
        raise VerdictForbids("Q is degenerate; the extension theorem does not apply")
    if (side == "upper" and not verdict.up) or (side == "lower" and not verdict.down):
        raise VerdictForbids(
            f"verdict {verdict.verdict.value} does not allow extension to the {side} side",
            side=side,
            verdict=verdict.verdict.value,
        )
    if side == "upper":
        wm, ws, wdata = model, s, data
    else:
        wm, ws, wdata = model.flipped(), -s, data.flipped()

    disc = disc_through((z, ws), wm, variant=variant, K=K)
    disc = transversal_perturb(disc, seed=seed)
    cv = cauchy_eval(wdata, disc, 0.0, est_tol=est_tol)
    chain = [_disc_record(disc, cv, side=side, variant=variant)]
    if _disc_in_tube(disc, w_factor):
        chain[0]["in_tube"] = True
        return ExtensionResult(cv.value, cv.est_error, chain, "direct")
    chain[0]["in_tube"] = False

    fam = shrink_family(disc, steps)
    chain.append({"step": "shrink_family", **fam.to_json()})
    value, err, method = cv.value, cv.est_error, "shrink_family"
    if fam.end == "origin" and rational:
        nf = block_reduce_B(wm.quadric())
        w = np.linalg.solve(nf.transform, z)
        lam1, lam2 = nf.lambdas
        axis = wm.n == 2 or float(np.abs(w[2:]).max()) <= 1e-12 * (1 + float(np.abs(w).max()))
        t0 = complex(lam1 * w[0] ** 2 + lam2 * w[1] ** 2)
        if not axis:
            chain.append({"step": "disc_value", "reason": "point off the reduced (w1, w2) plane"})
        elif lam1 <= 0 or lam2 <= 0 or abs(t0) <= 1e-12:
            chain.append({"step": "hartogs_fallback",
                          "reason": "vanishing invariant or point on g = 0; disc value kept"})
        else:
            try:
                path = continue_rational_leaf(wm, ws, t0, (lam1, lam2), nf.transform)
                leaf = rational_leaf(t0, (lam1, lam2), wm, ws, nf.transform, K)
                if not leaf.is_annulus:
                    raise BranchError("Y_t0 is not an annulus")
                lv = annulus_cauchy(wdata, leaf, leaf.inverse(z), est_tol=est_tol)
                chain.append({
                    "step": "rational_leaf",
                    "t0": [t0.real, t0.imag],
                    "t_path_length": len(path),
                    "t_start": [path[0].real, path[0].imag],
                    "value": [float(lv.value.real), float(lv.value.imag)],
                    "est_error": lv.est_error,
                    "disc_cross_check": abs(lv.value - cv.value),
                })
                value, err, method = lv.value, lv.est_error, "rational_leaf"
            except (BranchError, ContinuationStuck, EmptyLeaf) as exc:
                chain.append({"step": "hartogs_fallback", "reason": str(exc)})
    return ExtensionResult(value, err, chain, method)


# ---------------------------------------------------------------------------
# non-extension reports
# ---------------------------------------------------------------------------
@dataclass
class DivergenceReport:
    example_id: str
    mechanism: str
    passed: bool
    metric: float
    threshold: float
    values: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "example": self.example_id,
            "mechanism": self.mechanism,
            "passed": self.passed,
            "metric": float(self.metric),
            "threshold": float(self.threshold),
            "values": [float(v) for v in self.values],
            "details": self.details,
        }


def divergence_along(data: BoundaryData, probes, *, nodes: int = 64, threshold: float = 1e3,
                     example_id: str = "probe-path") -> DivergenceReport:
    """Sup of ``|data|`` on small circles around probe points in every coordinate line.

    The circle radius is half the smallest nonzero coordinate modulus of the
    probe, so the circles shrink toward the pole set as the probes approach
    it.  Passes when the sups grow monotonically by ``threshold`` or more.
    """
    sups = []
    e = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    for z, s in probes:
        z = np.asarray(z, dtype=complex)
        nz = np.abs(z)[np.abs(z) > 0]
        rad = 0.5 * float(nz.min()) if nz.size else 0.5
        pts = []
        for j in range(len(z)):
            q = np.tile(z, (nodes, 1))
            q[:, j] += rad * e
            pts.append(q)
        vals = data(np.concatenate(pts), float(s))
        sups.append(float(np.abs(vals).max()))
    sups_arr = np.array(sups)
    growth = float(sups_arr[-1] / sups_arr[0]) if sups_arr[0] > 0 else float("inf")
    monotone = bool(np.all(np.diff(sups_arr) >= -1e-12 * sups_arr[:-1]))
    return DivergenceReport(
        example_id, "boundary sup growth toward the pole set", growth >= threshold and monotone,
        growth, threshold, sups, {"monotone": monotone},
    )


def open_arc_cauchy(f_vals, tau, xi) -> complex:
    """``(1/2 pi i) int f / (tau - xi) dtau`` along an open polyline ``tau``.

    The value at the node nearest to ``xi`` is subtracted and integrated
    exactly through a continuous branch of ``log(tau - xi)``; the smooth
    remainder uses the trapezoid rule.
    """
    tau = np.asarray(tau, dtype=complex)
    f_vals = np.asarray(f_vals, dtype=complex)
    k = int(np.argmin(np.abs(tau - xi)))
    f0 = f_vals[k]
    diff = tau - xi
    logs = np.log(np.abs(diff)) + 1j * np.unwrap(np.angle(diff))
    exact = f0 * (logs[-1] - logs[0])
    g = (f_vals - f0) / diff
    dt = np.diff(tau)
    smooth = np.sum(0.5 * (g[1:] + g[:-1]) * dt)
    return complex((exact + smooth) / (2j * np.pi))


def _arc_mismatch(lam: float, s: float, c: float, K: int, depth: float) -> DivergenceReport:
    model = QuadricModel([[1.0]], [[lam]])
    src = f"(exp(-{c}/(-x1)) if x1 < -0.001 else 0) + (exp(-{c}/(-y1)) if y1 < -0.001 else 0)"
    data = BoundaryData.from_expression(src, 1)
    disc = line_disc(model, [0.0], s, [1.0], K=K, trace=True)
    ct = disc.contour()
    ang = np.angle(ct.tau)
    sel = (ang > np.pi / 8) & (ang < 3 * np.pi / 8)
    probes = (1 - depth) * ct.tau[sel][:: max(1, sel.sum() // 8)]
    mism, errs = [], []
    for xi in probes:
        cv = cauchy_eval(data, disc, xi, est_tol=1e-6)
        mism.append(abs(cv.value))
        errs.append(cv.est_error)
    metric = float(max(mism))
    return DivergenceReport(
        "8.2", "Cauchy extension from the full boundary vs zero data on the first-quadrant arc",
        metric > 0.1, metric, 0.1, mism,
        {"lambda": lam, "s": s, "max_est_error": float(max(errs)), "data": src},
    )


def _component_mismatch(lam: float, s: float, Y: float, nodes: int, depth: float) -> DivergenceReport:
    data = BoundaryData.from_expression("1 if x1 > 0 else 0", 2)
    # slice z2 = 0: region (1 + 2 lam) x^2 - (2 lam - 1) y^2 < s between two hyperbola branches
    a, b = 1 + 2 * lam, 2 * lam - 1
    if b <= 0:
        raise ValueError("needs lambda > 1/2 for a disconnected leaf boundary")
    y = Y * np.sinh(np.linspace(-6, 6, nodes)) / np.sinh(6)
    xb = np.sqrt((s + b * y**2) / a)
    right = xb + 1j * y  # upward, region on the left
    left = (-xb + 1j * y)[::-1]  # downward
    zero = np.zeros(nodes)

    def F(xi):
        vr = open_arc_cauchy(data(np.stack([right, zero], -1), s), right, xi)
        vl = open_arc_cauchy(data(np.stack([left, zero], -1), s), left, xi)
        return vr + vl

    x0 = float(np.sqrt(s / a))
    probes = {"right": (x0 - depth, 1.0), "left": (-x0 + depth, 0.0)}
    mism = {k: abs(F(complex(p)) - c) for k, (p, c) in probes.items()}
    metric = float(max(mism.values()))
    return DivergenceReport(
        "8.3", "single-valued Cauchy candidate vs constants 0 and 1 on the two boundary components",
        metric > 0.4, metric, 0.4, [mism["left"], mism["right"]],
        {"lambda": lam, "s": s, "truncation": Y, "candidate_right": float(abs(F(complex(probes['right'][0]))))},
    )


def verify_nonextension(example_id: str, *, probes=None, **opts) -> DivergenceReport:
    """Demonstrate failure of extension for one of the bundled counterexamples.

    ``"2.3"`` and ``"2.4-lower"`` track the growth of the data near its pole
    set, ``"8.2"`` compares the Cauchy extension with zero boundary data on an
    arc, and ``"8.3"`` compares a single-valued Cauchy candidate with two
    different constants on the two boundary components.
    """
    if example_id == "2.3":
        data = BoundaryData.from_expression(
            "exp(-1/s**2)/z1 if s > 0 else (0 if s == 0 else exp(-1/s**2)/z2)", 2)
        s = opts.get("s", 0.5)
        if probes is None:
            probes = [(np.array([0.4 * 10 ** (-k / 2), 0.0]), s) for k in range(9)]
        rep = divergence_along(data, probes, example_id="2.3")
        return rep
    if example_id == "2.4-lower":
        data = BoundaryData.from_expression("exp(-1/s**2)/z3 if s < 0 else 0", 3)
        s = opts.get("s", -0.5)
        if probes is None:
            probes = [(np.array([0.0, 0.0, 0.4 * 10 ** (-k / 2)]), s) for k in range(9)]
        return divergence_along(data, probes, example_id="2.4-lower")
    if example_id == "8.2":
        return _arc_mismatch(opts.get("lam", 0.25), opts.get("s", 1.0), opts.get("c", 0.1),
                             opts.get("K", 2048), opts.get("depth", 0.1))
    if example_id == "8.3":
        return _component_mismatch(opts.get("lam", 1.0), opts.get("s", 0.5), opts.get("Y", 1e4),
                                   opts.get("nodes", 200001), opts.get("depth", 0.05))
    raise ValueError(f"unknown example {example_id!r}")
