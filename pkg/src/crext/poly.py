"""Sparse polynomials in (z, zbar) and in (z, s).

A :class:`CPolynomial` in ``n`` complex variables is stored as a dictionary
mapping a flat exponent tuple of length ``2n`` (the ``z`` exponents followed
by the ``zbar`` exponents) to a complex coefficient.  A :class:`SPolynomial`
uses a flat exponent tuple of length ``n + 1`` (the ``z`` exponents followed by
the power of the real parameter ``s``).

Both classes are immutable value types: arithmetic always returns a new
object, and zero coefficients are never stored.
"""
from __future__ import annotations

import numbers
from typing import Iterable, Mapping

import numpy as np

__all__ = ["CPolynomial", "SPolynomial", "monomials"]


def _clean(terms: Mapping[tuple, complex]) -> dict:
    return {k: complex(v) for k, v in terms.items() if v != 0}


def monomials(nvars: int, degree: int):
    """Yield all exponent tuples of ``nvars`` variables with total ``degree``.

    The order is lexicographic (largest first exponent first), which keeps
    every routine built on top of it deterministic.
    """
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            yield (first,) + rest


def _monomial_values(w, exps):
    """Values of the monomials ``w^exps[t]`` at the rows of ``w`` (tables of powers, no pow)."""
    vals = np.ones((w.shape[0], exps.shape[0]), dtype=complex)
    for i in range(w.shape[1]):
        col = exps[:, i]
        top = int(col.max(initial=0))
        if top == 0:
            continue
        table = np.empty((w.shape[0], top + 1), dtype=complex)
        table[:, 0] = 1.0
        for e in range(1, top + 1):
            table[:, e] = table[:, e - 1] * w[:, i]
        vals *= table[:, col]
    return vals


class _SparsePoly:
    """Shared machinery for the two polynomial flavours."""

    __slots__ = ("n", "terms", "_eval_cache")
    width: int  # exponent tuple length, set by subclasses via _width()

    def __init__(self, n: int, terms: Mapping[tuple, complex] | None = None):
        if n < 1:
            raise ValueError("number of complex variables must be positive")
        self.n = int(n)
        terms = _clean(terms or {})
        w = self._width()
        for key in terms:
            if len(key) != w or any((not isinstance(e, (int, np.integer))) or e < 0 for e in key):
                raise ValueError(f"bad exponent tuple {key!r} for n={n}")
        self.terms = {tuple(int(e) for e in k): v for k, v in sorted(terms.items())}
        self._eval_cache = None

    # -- subclass hooks -------------------------------------------------
    def _width(self) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def _term_degree(self, key) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def constant(cls, n, c):
        inst = cls(n)
        return cls(n, {(0,) * inst._width(): c})

    # -- basic protocol -------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, type(self)):
            if other.n != self.n:
                raise ValueError("polynomials live in different dimensions")
            return other
        if isinstance(other, numbers.Number):
            return type(self).constant(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return type(self)(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return type(self)(self.n, {k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return type(self)(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = type(self).constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.n, tuple(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    # -- degree bookkeeping --------------------------------------------
    def degree(self) -> int:
        """Largest (weighted) degree of a stored term; -1 for the zero polynomial."""
        return max((self._term_degree(k) for k in self.terms), default=-1)

    def valuation(self) -> int | None:
        """Smallest (weighted) degree of a stored term; ``None`` for zero."""
        return min((self._term_degree(k) for k in self.terms), default=None)

    def homogeneous_part(self, d: int):
        return type(self)(self.n, {k: v for k, v in self.terms.items() if self._term_degree(k) == d})

    def truncate(self, d: int):
        """Drop every term of degree greater than ``d``."""
        return type(self)(self.n, {k: v for k, v in self.terms.items() if self._term_degree(k) <= d})

    def is_homogeneous(self) -> bool:
        return len({self._term_degree(k) for k in self.terms}) <= 1

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def chop(self, tol: float):
        """Drop coefficients with modulus ``<= tol``."""
        return type(self)(self.n, {k: v for k, v in self.terms.items() if abs(v) > tol})

    def has_integer_coefficients(self) -> bool:
        return all(v.real == int(v.real) and v.imag == int(v.imag) for v in self.terms.values())

    def distance(self, other) -> float:
        """Max coefficient modulus of ``self - other``."""
        return (self - other).max_abs_coeff()

    def to_json(self):
        raise NotImplementedError

    def _exponent_array(self):
        if self._eval_cache is None:
            keys = list(self.terms)
            exps = np.array(keys, dtype=np.int64).reshape(len(keys), self._width())
            coeffs = np.array([self.terms[k] for k in keys], dtype=complex)
            self._eval_cache = (exps, coeffs)
        return self._eval_cache


class CPolynomial(_SparsePoly):
    """Polynomial in ``z_1..z_n`` and ``zbar_1..zbar_n``.

    >>> z1 = CPolynomial.z(2, 0)
    >>> (z1 * z1.conj()).terms
    {(1, 0, 1, 0): (1+0j)}
    """

    __slots__ = ()

    def _width(self):
        return 2 * self.n

    def _term_degree(self, key):
        return sum(key)

    @classmethod
    def z(cls, n: int, j: int):
        e = [0] * (2 * n)
        e[j] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def zbar(cls, n: int, j: int):
        e = [0] * (2 * n)
        e[n + j] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def monomial(cls, z_exp, zbar_exp, coeff=1.0):
        n = len(z_exp)
        if len(zbar_exp) != n:
            raise ValueError("z and zbar exponent vectors differ in length")
        return cls(n, {tuple(z_exp) + tuple(zbar_exp): coeff})

    @classmethod
    def hermitian(cls, A):
        """The form ``zbar^t A z``."""
        A = np.asarray(A, dtype=complex)
        n = A.shape[0]
        out = {}
        for j in range(n):
            for k in range(n):
                if A[j, k] != 0:
                    e = [0] * (2 * n)
                    e[k] += 1
                    e[n + j] += 1
                    out[tuple(e)] = out.get(tuple(e), 0) + A[j, k]
        return cls(n, out)

    @classmethod
    def bilinear(cls, B):
        """The form ``z^t B z``."""
        B = np.asarray(B, dtype=complex)
        n = B.shape[0]
        out = {}
        for j in range(n):
            for k in range(n):
                if B[j, k] != 0:
                    e = [0] * (2 * n)
                    e[j] += 1
                    e[k] += 1
                    out[tuple(e)] = out.get(tuple(e), 0) + B[j, k]
        return cls(n, out)

    def z_part(self, key):
        return key[: self.n]

    def zbar_part(self, key):
        return key[self.n:]

    def conj(self) -> "CPolynomial":
        """Complex conjugate: swap the roles of ``z`` and ``zbar``."""
        n = self.n
        return CPolynomial(n, {k[n:] + k[:n]: v.conjugate() for k, v in self.terms.items()})

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, self.max_abs_coeff())
        return (self - self.conj()).max_abs_coeff() <= tol * scale

    def is_holomorphic(self) -> bool:
        n = self.n
        return all(not any(k[n:]) for k in self.terms)

    def diff(self, j: int, conjugate: bool = False) -> "CPolynomial":
        """Wirtinger derivative in ``z_j`` (or ``zbar_j`` when ``conjugate``)."""
        idx = j + (self.n if conjugate else 0)
        out = {}
        for k, v in self.terms.items():
            e = k[idx]
            if e:
                kk = list(k)
                kk[idx] -= 1
                out[tuple(kk)] = v * e
        return CPolynomial(self.n, out)

    def dz(self, j: int) -> "CPolynomial":
        return self.diff(j, conjugate=False)

    def dzbar(self, j: int) -> "CPolynomial":
        return self.diff(j, conjugate=True)

    def __call__(self, z):
        """Evaluate at ``z`` (shape ``(n,)`` or ``(..., n)``) with ``zbar = conj(z)``."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"expected last axis of length {self.n}")
        if not self.terms:
            return np.zeros(z.shape[:-1], dtype=complex) if z.ndim > 1 else 0j
        exps, coeffs = self._exponent_array()
        w = np.concatenate([z, z.conj()], axis=-1)
        flat = w.reshape(-1, 2 * self.n)
        out = _monomial_values(flat, exps) @ coeffs
        if z.ndim == 1:
            return complex(out[0])
        return out.reshape(z.shape[:-1])

    def to_json(self):
        n = self.n
        return [
            {"z_exp": list(k[:n]), "zbar_exp": list(k[n:]), "coeff": [v.real, v.imag]}
            for k, v in self.terms.items()
        ]

    @classmethod
    def from_json(cls, n: int, items: Iterable[dict]):
        out = {}
        for item in items:
            key = tuple(item["z_exp"]) + tuple(item["zbar_exp"])
            re, im = item["coeff"]
            out[key] = out.get(key, 0) + complex(re, im)
        return cls(n, out)

    def __repr__(self):
        if not self.terms:
            return f"CPolynomial(n={self.n}, 0)"
        parts = []
        for k, v in self.terms.items():
            mono = "".join(
                f"z{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(k[: self.n]) if e
            ) + "".join(
                f"zb{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(k[self.n:]) if e
            )
            parts.append(f"({v:.6g}){mono}")
        return f"CPolynomial(n={self.n}, " + " + ".join(parts) + ")"


class SPolynomial(_SparsePoly):
    """Polynomial in ``z_1..z_n`` and the real parameter ``s``.

    The weighted degree of ``z^alpha s^k`` is ``|alpha| + 2k``, matching the
    scaling ``s ~ |z|^2`` along the model manifold.
    """

    __slots__ = ()

    def _width(self):
        return self.n + 1

    def _term_degree(self, key):
        return sum(key[:-1]) + 2 * key[-1]

    @classmethod
    def z(cls, n: int, j: int):
        e = [0] * (n + 1)
        e[j] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def s(cls, n: int):
        return cls(n, {(0,) * n + (1,): 1})

    def diff_z(self, j: int) -> "SPolynomial":
        out = {}
        for k, v in self.terms.items():
            if k[j]:
                kk = list(k)
                kk[j] -= 1
                out[tuple(kk)] = v * k[j]
        return SPolynomial(self.n, out)

    def diff_s(self) -> "SPolynomial":
        out = {}
        for k, v in self.terms.items():
            if k[-1]:
                out[k[:-1] + (k[-1] - 1,)] = v * k[-1]
        return SPolynomial(self.n, out)

    def weighted_degrees(self):
        return sorted({self._term_degree(k) for k in self.terms})

    def __call__(self, z, s):
        """Evaluate at points ``z`` (``(..., n)``) and parameters ``s`` (broadcast)."""
        z = np.asarray(z, dtype=complex)
        s = np.asarray(s, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"expected last axis of length {self.n}")
        scalar = z.ndim == 1
        flat = z.reshape(-1, self.n)
        sflat = np.broadcast_to(s, z.shape[:-1]).reshape(-1)
        if not self.terms:
            out = np.zeros(flat.shape[0], dtype=complex)
        else:
            exps, coeffs = self._exponent_array()
            w = np.concatenate([flat, sflat[:, None]], axis=1)
            out = _monomial_values(w, exps) @ coeffs
        if scalar:
            return complex(out[0])
        return out.reshape(z.shape[:-1])

    def to_json(self):
        return [
            {"z_exp": list(k[:-1]), "s_exp": k[-1], "coeff": [v.real, v.imag]}
            for k, v in self.terms.items()
        ]

    @classmethod
    def from_json(cls, n: int, items: Iterable[dict]):
        out = {}
        for item in items:
            key = tuple(item["z_exp"]) + (int(item["s_exp"]),)
            re, im = item["coeff"]
            out[key] = out.get(key, 0) + complex(re, im)
        return cls(n, out)

    def __repr__(self):
        if not self.terms:
            return f"SPolynomial(n={self.n}, 0)"
        parts = []
        for k, v in self.terms.items():
            mono = "".join(
                f"z{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(k[:-1]) if e
            ) + (("s" + (f"^{k[-1]}" if k[-1] > 1 else "")) if k[-1] else "")
            parts.append(f"({v:.6g}){mono}")
        return f"SPolynomial(n={self.n}, " + " + ".join(parts) + ")"
