"""JSON ingestion for models, points, polynomials and boundary data.

Complex numbers are ``[re, im]`` pairs.  A model file looks like::

    {"n": 2,
     "A": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
     "B": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
     "E": [{"z_exp": [1, 0], "zbar_exp": [1, 1], "coeff": [1, 0]}]}

Schema violations raise :class:`SchemaError` carrying a field path such as
``A[1][0]``; unreadable JSON raises :class:`ParseError`.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .extend import BoundaryData
from .poly import CPolynomial, SPolynomial
from .quadric import QuadricModel

__all__ = [
    "load_json",
    "parse_json",
    "parse_model",
    "model_to_json",
    "parse_point",
    "parse_cpolynomial",
    "parse_spolynomial",
    "parse_data",
    "parse_probe_path",
]


def parse_json(text: str):
    if not text or not text.strip():
        raise ParseError("empty input")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc


def load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_json(text)


def _number(v, path) -> complex:
    if isinstance(v, bool):
        raise SchemaError(path, "expected a number or [re, im] pair")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise SchemaError(path, "expected a number or [re, im] pair")


def _real(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(path, "expected a real number")
    return float(v)


def _matrix(v, n, path):
    if not isinstance(v, list) or len(v) != n:
        raise SchemaError(path, f"expected {n} rows")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}[{i}]", f"expected {n} entries")
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{path}[{i}][{j}]")
    return out


def _exponents(v, n, path):
    if not isinstance(v, list) or len(v) != n:
        raise SchemaError(path, f"expected {n} exponents")
    for i, e in enumerate(v):
        if isinstance(e, bool) or not isinstance(e, int) or e < 0:
            raise SchemaError(f"{path}[{i}]", "expected a nonnegative integer")
    return tuple(v)


def parse_cpolynomial(items, n: int, path: str = "terms") -> CPolynomial:
    if not isinstance(items, list):
        raise SchemaError(path, "expected a list of monomials")
    terms = {}
    for i, item in enumerate(items):
        p = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(p, "expected an object")
        for key in ("z_exp", "zbar_exp", "coeff"):
            if key not in item:
                raise SchemaError(f"{p}.{key}", "missing field")
        k = _exponents(item["z_exp"], n, f"{p}.z_exp") + _exponents(item["zbar_exp"], n, f"{p}.zbar_exp")
        terms[k] = terms.get(k, 0) + _number(item["coeff"], f"{p}.coeff")
    return CPolynomial(n, terms)


def parse_spolynomial(items, n: int, path: str = "terms") -> SPolynomial:
    if not isinstance(items, list):
        raise SchemaError(path, "expected a list of monomials")
    terms = {}
    for i, item in enumerate(items):
        p = f"{path}[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(p, "expected an object")
        for key in ("z_exp", "s_exp", "coeff"):
            if key not in item:
                raise SchemaError(f"{p}.{key}", "missing field")
        se = item["s_exp"]
        if isinstance(se, bool) or not isinstance(se, int) or se < 0:
            raise SchemaError(f"{p}.s_exp", "expected a nonnegative integer")
        k = _exponents(item["z_exp"], n, f"{p}.z_exp") + (se,)
        terms[k] = terms.get(k, 0) + _number(item["coeff"], f"{p}.coeff")
    return SPolynomial(n, terms)


def parse_model(obj) -> QuadricModel:
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    n = obj.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("n", "expected a positive integer")
    if "A" not in obj:
        raise SchemaError("A", "missing field")
    A = _matrix(obj["A"], n, "A")
    B = _matrix(obj["B"], n, "B") if "B" in obj else np.zeros((n, n), dtype=complex)
    if not np.allclose(A, A.conj().T, atol=1e-12):
        raise SchemaError("A", "matrix is not Hermitian")
    E = parse_cpolynomial(obj.get("E", []), n, "E")
    if E:
        if E.valuation() < 3:
            raise SchemaError("E", "higher-order terms must have degree at least 3")
        if not E.is_real_valued():
            raise SchemaError("E", "higher-order terms must be real valued")
    return QuadricModel(A, B, E if E else None)


def _pair(c: complex):
    return [float(c.real), float(c.imag)]


def model_to_json(model: QuadricModel) -> dict:
    return {
        "n": model.n,
        "A": [[_pair(x) for x in row] for row in np.asarray(model.A)],
        "B": [[_pair(x) for x in row] for row in np.asarray(model.B)],
        "E": [] if model.E is None else model.E.to_json(),
    }


def parse_point(obj, n: int, path: str = "$"):
    """``{"z": [[re, im], ...], "s": real}`` to ``(z, s)``."""
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if "z" not in obj:
        raise SchemaError(f"{path}.z", "missing field")
    if "s" not in obj:
        raise SchemaError(f"{path}.s", "missing field")
    zs = obj["z"]
    if not isinstance(zs, list) or len(zs) != n:
        raise SchemaError(f"{path}.z", f"expected {n} coordinates")
    z = np.array([_number(v, f"{path}.z[{i}]") for i, v in enumerate(zs)])
    return z, _real(obj["s"], f"{path}.s")


def parse_probe_path(obj, n: int):
    if isinstance(obj, dict):
        obj = obj.get("probes")
    if not isinstance(obj, list) or len(obj) < 2:
        raise SchemaError("probes", "expected a list of at least two points")
    return [parse_point(p, n, f"probes[{i}]") for i, p in enumerate(obj)]


def parse_data(obj, n: int) -> BoundaryData:
    """Boundary data: an expression, a polynomial in ``(z, zbar)`` or a polynomial ``F(z, s)``.

    Accepted forms are ``{"kind": "expression", "source": "..."}``,
    ``{"kind": "polynomial", "terms": [...]}``,
    ``{"kind": "spolynomial", "terms": [...]}`` and a bare polynomial list.
    """
    if isinstance(obj, list):
        return BoundaryData.from_cpolynomial(parse_cpolynomial(obj, n))
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object or a monomial list")
    kind = obj.get("kind")
    if kind == "expression":
        src = obj.get("source")
        if not isinstance(src, str):
            raise SchemaError("source", "expected a string")
        return BoundaryData.from_expression(src, n)
    if kind == "polynomial":
        return BoundaryData.from_cpolynomial(parse_cpolynomial(obj.get("terms"), n))
    if kind == "spolynomial":
        return BoundaryData.from_spolynomial(parse_spolynomial(obj.get("terms"), n))
    raise SchemaError("kind", "expected 'expression', 'polynomial' or 'spolynomial'")
