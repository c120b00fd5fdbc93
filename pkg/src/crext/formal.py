"""Polynomial and formal extension of CR data from the model manifold.

A CR polynomial ``f(z, zbar)`` on ``s = Q`` is written as ``F(z, Q(z, zbar))``
for a polynomial ``F(z, s)``; matching coefficients gives an overdetermined
linear system which is consistent exactly when ``f`` is CR (for nondegenerate
``Q`` with at least two positive eigenvalues in ``A``).  Iterating degree by
degree against the full model ``Q + E`` produces the formal series.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crfields import is_cr
from .errors import HypothesisError, NotCRError, OrderOverflow
from .poly import CPolynomial, SPolynomial, monomials
from .quadric import ZERO_TOL, QuadricModel, inertia, is_q_nondegenerate

__all__ = [
    "CONSISTENCY_TOL",
    "compose",
    "weighted_basis",
    "matching_matrix",
    "extend_homogeneous",
    "ExtensionSolve",
    "Jet",
    "formal_jet",
    "chain_identity_check",
]

CONSISTENCY_TOL = 1e-9


def _powers(model, k_max: int, max_degree: int | None):
    key = ("rho_powers", max_degree)
    cache = model._cache.setdefault(key, [CPolynomial.constant(model.n, 1)])
    rho = model.rho_poly()
    while len(cache) <= k_max:
        nxt = cache[-1] * rho
        if max_degree is not None:
            nxt = nxt.truncate(max_degree)
        cache.append(nxt)
    return cache


def compose(F: SPolynomial, model: QuadricModel, max_degree: int | None = None) -> CPolynomial:
    """Substitute ``s = rho(z, zbar)`` into ``F``; optionally drop degrees above ``max_degree``."""
    n = model.n
    if F.n != n:
        raise ValueError("F and the model live in different dimensions")
    k_max = max((k[-1] for k in F.terms), default=0)
    pw = _powers(model, k_max, max_degree)
    out: dict = {}
    for key, c in F.terms.items():
        alpha, k = key[:-1], key[-1]
        if max_degree is not None and sum(alpha) + 2 * k > max_degree:
            continue
        for pk, pc in pw[k].terms.items():
            if max_degree is not None and sum(alpha) + sum(pk) > max_degree:
                continue
            kk = tuple(a + b for a, b in zip(alpha, pk[:n])) + pk[n:]
            out[kk] = out.get(kk, 0) + c * pc
    return CPolynomial(n, out)


def weighted_basis(n: int, d: int) -> list[tuple]:
    """Exponent keys ``alpha + (k,)`` of ``z^alpha s^k`` with ``|alpha| + 2k = d``."""
    return [alpha + (k,) for k in range(d // 2 + 1) for alpha in monomials(n, d - 2 * k)]


def matching_matrix(model: QuadricModel, d: int):
    """Columns are the coefficient vectors of ``z^alpha Q^k`` for the weighted basis.

    Returns ``(matrix, row_keys, basis)`` where ``row_keys`` indexes the
    ``(z, zbar)`` monomials of degree ``d``.
    """
    key = ("matching", d)
    if key in model._cache:
        return model._cache[key]
    quad = model.quadric()
    basis = weighted_basis(model.n, d)
    polys = [compose(SPolynomial(model.n, {b: 1}), quad) for b in basis]
    row_keys = sorted({k for p in polys for k in p.terms})
    index = {k: i for i, k in enumerate(row_keys)}
    M = np.zeros((len(row_keys), len(basis)), dtype=complex)
    for col, p in enumerate(polys):
        for k, v in p.terms.items():
            M[index[k], col] = v
    model._cache[key] = (M, row_keys, basis)
    return model._cache[key]


@dataclass(frozen=True)
class ExtensionSolve:
    F: SPolynomial
    residual: float
    rank: int
    columns: int
    condition: float

    @property
    def unique(self) -> bool:
        return self.rank == self.columns


def _check_hypotheses(model: QuadricModel, zero_tol: float):
    if not is_q_nondegenerate(model, zero_tol):
        raise HypothesisError("Q is degenerate")
    if inertia(model.A, zero_tol).positive < 2:
        raise HypothesisError("A needs at least two positive eigenvalues")


def extend_homogeneous(
    f_d: CPolynomial,
    model: QuadricModel,
    *,
    tol: float = CONSISTENCY_TOL,
    zero_tol: float = ZERO_TOL,
    details: bool = False,
):
    """Solve ``F(z, Q) = f_d`` for weighted homogeneous ``F`` of degree ``deg f_d``.

    The system is solved by least squares; a relative residual above ``tol``
    means ``f_d`` is not CR and raises :class:`NotCRError`.  With
    ``details=True`` an :class:`ExtensionSolve` (rank, conditioning) is
    returned instead of the bare polynomial.
    """
    if not model.is_pure:
        raise ValueError("extend_homogeneous works on the pure quadric model")
    if f_d.n != model.n:
        raise ValueError("f and the model live in different dimensions")
    if not f_d.is_homogeneous():
        raise ValueError("f must be homogeneous")
    _check_hypotheses(model, zero_tol)
    n = model.n
    if not f_d:
        F = SPolynomial.zero(n)
        return ExtensionSolve(F, 0.0, 0, 0, 1.0) if details else F
    d = f_d.degree()
    M, row_keys, basis = matching_matrix(model, d)
    index = {k: i for i, k in enumerate(row_keys)}
    b = np.zeros(len(row_keys), dtype=complex)
    outside = 0.0
    for k, v in f_d.terms.items():
        if k in index:
            b[index[k]] = v
        else:
            outside = max(outside, abs(v))
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    scale = max(f_d.max_abs_coeff(), 1e-300)
    resid = max(float(np.abs(M @ x - b).max(initial=0.0)), outside) / scale
    if resid > tol:
        raise NotCRError(
            f"no polynomial F(z, s) matches f on the quadric (relative residual {resid:.3e})",
            residual=resid,
        )
    sv = np.linalg.svd(M, compute_uv=False)
    rank = int((sv > 1e-10 * sv[0]).sum())
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    x = np.where(np.abs(x) > 1e-14 * np.abs(x).max(), x, 0)
    F = SPolynomial(n, {key: c for key, c in zip(basis, x)})
    if details:
        return ExtensionSolve(F, resid, rank, len(basis), cond)
    return F


@dataclass(frozen=True)
class Jet:
    order: int
    f_truncation: CPolynomial
    F_truncation: SPolynomial
    residual_valuation: int

    def __call__(self, z, s):
        return self.F_truncation(z, s)


def formal_jet(
    f_data: CPolynomial,
    model: QuadricModel,
    N: int,
    *,
    max_order: int = 40,
    tol: float = CONSISTENCY_TOL,
    zero_tol: float = ZERO_TOL,
) -> Jet:
    """Order-by-order formal extension ``F`` with ``F(z, Q + E) = f`` up to degree ``N``.

    Each homogeneous layer of the running remainder is checked for the CR
    condition on the quadric, extended there, and the composition with the
    full model is subtracted.
    """
    if N > max_order:
        raise OrderOverflow(f"order {N} exceeds the budget {max_order}", order=N, budget=max_order)
    if N < 0:
        raise ValueError("order must be nonnegative")
    quad = model.quadric()
    _check_hypotheses(quad, zero_tol)
    n = model.n
    f_trunc = f_data.truncate(N)
    scale = max(f_trunc.max_abs_coeff(), 1e-300)
    negligible = 1e-12 * scale
    remainder = f_trunc
    F = SPolynomial.zero(n)
    for k in range(N + 1):
        layer = remainder.homogeneous_part(k)
        if layer.max_abs_coeff() <= negligible:
            remainder = remainder - layer
            continue
        check = is_cr(layer, quad)
        if not check.ok:
            raise NotCRError(
                f"layer of degree {k} is not CR on the quadric model",
                witness=check.witness,
                layer=k,
            )
        try:
            Fk = extend_homogeneous(layer, quad, tol=tol, zero_tol=zero_tol)
        except NotCRError as exc:
            raise NotCRError(str(exc), layer=k, residual=exc.details.get("residual")) from exc
        remainder = remainder - compose(Fk, model, max_degree=N)
        F = F + Fk
    leftover = (compose(F, model, max_degree=N) - f_trunc).chop(negligible)
    val = leftover.valuation()
    return Jet(N, f_trunc, F, N + 1 if val is None else val)


def chain_identity_check(
    f: CPolynomial, F: SPolynomial, model: QuadricModel, order: int | None = None
) -> float:
    """Residual of the chain rule for ``f = F(z, rho)`` on the manifold.

    Computes, for every ``j``, the coefficient sup norms of
    ``f_{zbar_j} - F_s(z, rho) rho_{zbar_j}`` and
    ``f_{z_j} - F_{z_j}(z, rho) - F_s(z, rho) rho_{z_j}``.  When ``order`` is
    given (``F`` is a jet of that order) both sides are truncated at degree
    ``order - 1``.
    """
    rho = model.rho_poly()
    cut = None if order is None else order - 1
    Fs = compose(F.diff_s(), model, max_degree=cut)
    worst = 0.0
    for j in range(model.n):
        lhs_bar = f.dzbar(j) - Fs * rho.dzbar(j)
        lhs = f.dz(j) - compose(F.diff_z(j), model, max_degree=cut) - Fs * rho.dz(j)
        if cut is not None:
            lhs_bar, lhs = lhs_bar.truncate(cut), lhs.truncate(cut)
        worst = max(worst, lhs_bar.max_abs_coeff(), lhs.max_abs_coeff())
    return worst
