"""Bundled example models, boundary data and the fixture runner.

Each fixture pairs a model with the check that characterizes it: a verdict,
a CR singular locus, a leaf topology count, a divergence or mismatch report,
or a numeric extension compared with a closed form.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .extend import BoundaryData, extend_at_point, verify_nonextension
from .poly import CPolynomial
from .quadric import NumericModel, QuadricModel, cr_singular_locus, extension_verdict
from .topology import sample_leaf

__all__ = [
    "parabolic_model",
    "split_model",
    "one_negative_model",
    "cubed_split_model",
    "bishop_model",
    "hyperbolic_pair_model",
    "oscillating_model",
    "data_for",
    "FixtureResult",
    "FIXTURES",
    "verify_examples",
]


def parabolic_model(n: int = 2) -> QuadricModel:
    """``|z|^2 + Re sum z_j^2``: every Bishop invariant equals 1/2, so ``Q`` is degenerate."""
    return QuadricModel(np.eye(n), 0.5 * np.eye(n))


def split_model() -> QuadricModel:
    """``s = |z1|^2 - |z2|^2``."""
    return QuadricModel(np.diag([1.0, -1.0]), np.zeros((2, 2)))


def one_negative_model() -> QuadricModel:
    """``s = |z1|^2 + |z2|^2 - |z3|^2``."""
    return QuadricModel(np.diag([1.0, 1.0, -1.0]), np.zeros((3, 3)))


def cubed_split_model(p: int = 1, q: int = 1) -> QuadricModel:
    """``s = (|z'|^2 - |z''|^2)^3`` with ``z'`` of length ``p`` and ``z''`` of length ``q``."""
    n = p + q
    zs = [CPolynomial.z(n, j) * CPolynomial.zbar(n, j) for j in range(n)]
    base = sum(zs[:p], CPolynomial.zero(n)) - sum(zs[p:], CPolynomial.zero(n))
    return QuadricModel(np.zeros((n, n)), np.zeros((n, n)), base**3)


def bishop_model(lam: float = 0.25) -> QuadricModel:
    """``s = |z|^2 + lam (z^2 + zbar^2)`` in one variable."""
    return QuadricModel(np.eye(1), lam * np.eye(1))


def hyperbolic_pair_model(lam: float = 1.0) -> QuadricModel:
    """``s = |z1|^2 - |z2|^2 + lam (z1^2 + zbar1^2)``."""
    return QuadricModel(np.diag([1.0, -1.0]), np.diag([lam, 0.0]))


def _oscillating_rho(z):
    u = np.sum(np.abs(np.asarray(z)) ** 2, axis=-1)
    safe = np.where(u > 0, u, 1.0)
    return np.where(u > 0, np.sin(1 / safe) * np.exp(-1 / safe), 0.0)


def oscillating_model() -> NumericModel:
    """``s = sin(1/|z|^2) exp(-1/|z|^2)`` in one variable, flat at the origin."""
    return NumericModel(1, _oscillating_rho, label="sin(1/|z|^2) exp(-1/|z|^2)")


def data_for(name: str) -> BoundaryData:
    """Closed-form CR data of the bundled examples."""
    if name == "split":
        return BoundaryData.from_expression(
            "exp(-1/s**2)/z1 if s > 0 else (0 if s == 0 else exp(-1/s**2)/z2)", 2)
    if name == "one_negative":
        return BoundaryData.from_expression("0 if s >= 0 else exp(-1/s**2)/z3", 3)
    raise ValueError(f"no data bundled for {name!r}")


@dataclass
class FixtureResult:
    fixture: str
    check: str
    passed: bool
    numbers: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self):
        return {"fixture": self.fixture, "check": self.check, "passed": self.passed,
                "numbers": self.numbers}

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        nums = ", ".join(f"{k}={v}" for k, v in self.numbers.items())
        return f"[{mark}] {self.fixture:>4}  {self.check}  ({nums})"


def _fx_parabolic():
    m = parabolic_model(2)
    v = extension_verdict(m)
    loc = cr_singular_locus(m)
    # the kernel must be the plane x = 0 (imaginary axes)
    k = loc.kernel
    plane = k.shape[1] == 2 and np.allclose(k[:2], 0, atol=1e-12)
    ok = (not v.q_nondegenerate) and v.verdict.value == "QDegenerate" and plane
    return "degenerate Q, singular locus is a totally real 2-plane", ok, {
        "verdict": v.verdict.value, "kernel_dimension": int(k.shape[1])}


def _fx_split():
    v = extension_verdict(split_model())
    rep = verify_nonextension("2.3")
    ok = (v.a, v.b, v.q_nondegenerate, v.verdict.value) == (1, 1, True, "Inconclusive") and rep.passed
    return "verdict Inconclusive and boundary sup growth toward z1 = 0", ok, {
        "a": v.a, "b": v.b, "verdict": v.verdict.value, "growth": float(f"{rep.metric:.4g}")}


def _fx_one_negative():
    m = one_negative_model()
    v = extension_verdict(m)
    data = data_for("one_negative")
    errs = []
    for z, s in [((0.1, 0.05, 0.8), -0.5), ((0.0, 0.2, 0.9j), -0.7)]:
        res = extend_at_point(data, m, (np.array(z, dtype=complex), s))
        errs.append(abs(res.value - np.exp(-1 / s**2) / z[2]))
    lower = verify_nonextension("2.4-lower")
    ok = (v.a, v.b, v.verdict.value) == (2, 1, "ExtendsUp") and max(errs) < 1e-6 and lower.passed
    return "verdict ExtendsUp, extension matches closed form, no extension below", ok, {
        "a": v.a, "b": v.b, "verdict": v.verdict.value,
        "max_error": float(f"{max(errs):.3g}"), "lower_growth": float(f"{lower.metric:.4g}")}


def _fx_cubed():
    v = extension_verdict(cubed_split_model())
    ok = v.verdict.value == "QDegenerate"
    return "degenerate, out of theorem scope", ok, {"verdict": v.verdict.value}


def _fx_bishop():
    v = extension_verdict(bishop_model(0.25))
    rep = verify_nonextension("8.2")
    ok = v.verdict.value == "Inconclusive" and rep.passed
    return "Cauchy value off zero near the arc where the data vanish", ok, {
        "verdict": v.verdict.value, "arc_mismatch": float(f"{rep.metric:.4g}")}


def _fx_hyperbolic_pair():
    top = sample_leaf(hyperbolic_pair_model(1.0), 0.5, resolution=32)
    rep = verify_nonextension("8.3")
    ok = top.boundary_components == 2 and rep.passed
    return "leaf s = 0.5 has two boundary components; constants 0 and 1 do not extend", ok, {
        "components": top.components, "boundary_components": top.boundary_components,
        "component_mismatch": float(f"{rep.metric:.4g}")}


def _fx_oscillating():
    m = oscillating_model()
    loc = cr_singular_locus(m, box=1.5, inner=0.28, rays=64)
    expected = [1 / np.sqrt(np.pi / 4 + k * np.pi) for k in range(4)]
    radii = sorted(loc.radii, reverse=True)
    radii_ok = len(radii) == 4 and np.allclose(radii, expected, atol=1e-6)
    top = sample_leaf(m, 1e-4, resolution=128)
    ok = radii_ok and loc.includes_origin and top.boundary_components >= 2
    return "origin plus circles of singular points; small leaf boundary disconnected", ok, {
        "radii": [round(r, 6) for r in radii], "boundary_components": top.boundary_components}


FIXTURES = {
    "2.2": _fx_parabolic,
    "2.3": _fx_split,
    "2.4": _fx_one_negative,
    "2.5": _fx_cubed,
    "8.2": _fx_bishop,
    "8.3": _fx_hyperbolic_pair,
    "8.4": _fx_oscillating,
}


def verify_examples(only=None) -> list[FixtureResult]:
    """Run the bundled fixtures in a fixed order; ``only`` filters by id."""
    names = list(FIXTURES)
    if only:
        unknown = [o for o in only if o not in FIXTURES]
        if unknown:
            raise ValueError(f"unknown fixture(s): {', '.join(unknown)}")
        names = [n for n in names if n in only]
    out = []
    for name in names:
        t0 = time.perf_counter()
        try:
            check, ok, numbers = FIXTURES[name]()
        except Exception as exc:  # a crashing fixture is a failing fixture
            check, ok, numbers = "raised", False, {"error": f"{type(exc).__name__}: {exc}"}
        out.append(FixtureResult(name, check, bool(ok), numbers, time.perf_counter() - t0))
    return out
