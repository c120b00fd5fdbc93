"""Tangential antiholomorphic vector fields on ``s = rho(z, zbar)`` and the CR test.

Everything is computed in the parametrization of the manifold by ``z``: a
function on the manifold is a polynomial ``f(z, zbar)`` and the fields

    X_jk = rho_{zbar_j} d/dzbar_k - rho_{zbar_k} d/dzbar_j      (j < k)

span the CR bundle away from the CR singular points.
"""
from __future__ import annotations

from dataclasses import dataclass

from .poly import CPolynomial

__all__ = ["wirtinger", "CRField", "cr_basis", "CRCheck", "is_cr", "CR_REL_TOL"]

CR_REL_TOL = 1e-12


def wirtinger(p: CPolynomial, j: int, conjugate: bool = False) -> CPolynomial:
    """Formal ``d/dz_j`` (or ``d/dzbar_j`` when ``conjugate``)."""
    return p.diff(j, conjugate=conjugate)


@dataclass(frozen=True)
class CRField:
    """``coeff_k * d/dzbar_k - coeff_j * d/dzbar_j`` with ``coeff_k = rho_{zbar_j}``."""

    j: int
    k: int
    coeff_k: CPolynomial
    coeff_j: CPolynomial

    def __call__(self, f: CPolynomial) -> CPolynomial:
        return self.coeff_k * f.dzbar(self.k) - self.coeff_j * f.dzbar(self.j)

    def swapped(self) -> "CRField":
        """The field for ``(k, j)``, which is the negative of this one."""
        return CRField(self.k, self.j, self.coeff_j, self.coeff_k)


def _rho(model) -> CPolynomial:
    return model.rho_poly() if hasattr(model, "rho_poly") else model


def cr_basis(model) -> list[CRField]:
    """All ``n(n-1)/2`` fields ``X_jk`` with ``j < k`` (empty when ``n = 1``)."""
    rho = _rho(model)
    grads = [rho.dzbar(j) for j in range(rho.n)]
    return [
        CRField(j, k, grads[j], grads[k])
        for j in range(rho.n)
        for k in range(j + 1, rho.n)
    ]


@dataclass(frozen=True)
class CRCheck:
    ok: bool
    witness: CPolynomial | None = None
    pair: tuple | None = None

    def __bool__(self):
        return self.ok

    def __iter__(self):
        yield self.ok
        yield self.witness


def is_cr(f: CPolynomial, model, rel_tol: float = CR_REL_TOL) -> CRCheck:
    """Decide whether every ``X_jk f`` is the zero polynomial.

    Coefficients are compared against ``rel_tol`` times the scale
    ``max|f| * max|rho|``; when both inputs have integer coefficients the
    test is exact.  The witness is the first nonzero ``X_jk f``.
    """
    rho = _rho(model)
    exact = f.has_integer_coefficients() and rho.has_integer_coefficients()
    tol = 0.0 if exact else rel_tol * max(f.max_abs_coeff(), 1e-300) * max(rho.max_abs_coeff(), 1.0)
    for field in cr_basis(rho):
        w = field(f)
        if w.max_abs_coeff() > tol:
            return CRCheck(False, w.chop(tol), (field.j, field.k))
    return CRCheck(True)
