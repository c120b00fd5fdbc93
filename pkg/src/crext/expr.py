"""Safe evaluation of closed-form data expressions.

Expressions are ordinary Python syntax restricted to arithmetic, a few
functions and conditional expressions.  Variables are ``z1..zn`` (complex),
``zb1..zbn`` (conjugates), ``x1..xn`` / ``y1..yn`` (real and imaginary
parts), ``s`` and the constants ``pi``, ``e`` and ``I``.  Evaluation is
vectorized; the two branches of ``a if cond else b`` are evaluated only on
the points that select them, so guards like ``0 if s == 0 else exp(-1/s**2)``
never divide by zero.
"""
from __future__ import annotations

import ast
import re

import numpy as np

from .errors import DataDomainError, ParseError

__all__ = ["Expression", "DIV_TOL"]

DIV_TOL = 1e-14

_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "real": np.real,
    "imag": np.imag,
    "conj": np.conj,
}
_CONSTS = {"pi": np.pi, "e": np.e, "I": 1j}
_VAR = re.compile(r"^(z|zb|x|y)([1-9][0-9]*)$")

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_CMPOPS = (ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq)


class Expression:
    """A parsed expression in ``n`` complex variables and ``s``."""

    def __init__(self, source: str, n: int, div_tol: float = DIV_TOL):
        if not isinstance(source, str) or not source.strip():
            raise ParseError("empty expression")
        try:
            tree = ast.parse(source.strip(), mode="eval")
        except SyntaxError as exc:
            raise ParseError(f"cannot parse expression: {exc.msg}") from exc
        self.source = source
        self.n = int(n)
        self.div_tol = div_tol
        self._tree = tree.body
        self._check(self._tree)

    def _check(self, node):
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, complex)) or isinstance(node.value, bool):
                raise ParseError(f"unsupported constant {node.value!r}")
        elif isinstance(node, ast.Name):
            m = _VAR.match(node.id)
            if node.id == "s" or node.id in _CONSTS:
                return
            if not m or int(m.group(2)) > self.n:
                raise ParseError(f"unknown variable {node.id!r}")
        elif isinstance(node, ast.BinOp):
            if not isinstance(node.op, _BINOPS):
                raise ParseError(f"unsupported operator {type(node.op).__name__}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise ParseError("unsupported unary operator")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ParseError("unsupported function call")
            if len(node.args) != 1 or node.keywords:
                raise ParseError(f"{node.func.id} takes exactly one argument")
            self._check(node.args[0])
        elif isinstance(node, ast.IfExp):
            self._check(node.test)
            self._check(node.body)
            self._check(node.orelse)
        elif isinstance(node, ast.Compare):
            if len(node.ops) != 1 or not isinstance(node.ops[0], _CMPOPS):
                raise ParseError("only single comparisons are supported")
            self._check(node.left)
            self._check(node.comparators[0])
        elif isinstance(node, ast.BoolOp):
            for v in node.values:
                self._check(v)
        else:
            raise ParseError(f"unsupported syntax {type(node).__name__}")

    # -- evaluation ---------------------------------------------------------
    def __call__(self, z, s):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"expected last axis of length {self.n}")
        shape = z.shape[:-1]
        flat = z.reshape(-1, self.n)
        sv = np.broadcast_to(np.asarray(s, dtype=float), shape).reshape(-1)
        env = {"s": sv}
        for j in range(self.n):
            env[f"z{j + 1}"] = flat[:, j]
        with np.errstate(all="ignore"):
            out = self._eval(self._tree, env, np.arange(flat.shape[0]))
        out = np.broadcast_to(np.asarray(out, dtype=complex), (flat.shape[0],)).copy()
        if not np.all(np.isfinite(out)):
            raise DataDomainError(f"expression {self.source!r} is not finite at some points")
        return out.reshape(shape) if shape else complex(out[0])

    def _var(self, name, env, idx):
        if name == "s":
            return env["s"][idx]
        if name in _CONSTS:
            return _CONSTS[name]
        kind, j = _VAR.match(name).groups()
        zj = env[f"z{j}"][idx]
        return {"z": zj, "zb": np.conj(zj), "x": zj.real, "y": zj.imag}[kind]

    def _eval(self, node, env, idx):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return self._var(node.id, env, idx)
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, env, idx)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self._eval(node.left, env, idx)
            b = self._eval(node.right, env, idx)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if np.any(np.abs(b) <= self.div_tol):
                    raise DataDomainError(f"division by (near) zero in {self.source!r}")
                return a / b
            if np.any(np.abs(a) == 0) and np.any(np.real(b) < 0):
                raise DataDomainError(f"negative power of zero in {self.source!r}")
            return a**b
        if isinstance(node, ast.Call):
            arg = self._eval(node.args[0], env, idx)
            fn = _FUNCS[node.func.id]
            if node.func.id == "log" and np.any(np.abs(arg) <= self.div_tol):
                raise DataDomainError(f"logarithm of (near) zero in {self.source!r}")
            if node.func.id in ("log", "sqrt"):
                arg = np.asarray(arg, dtype=complex) if np.iscomplexobj(arg) or np.any(np.real(arg) < 0) else arg
            return fn(arg)
        if isinstance(node, ast.Compare):
            a = np.real(self._eval(node.left, env, idx))
            b = np.real(self._eval(node.comparators[0], env, idx))
            op = node.ops[0]
            res = {
                ast.Lt: np.less, ast.LtE: np.less_equal, ast.Gt: np.greater,
                ast.GtE: np.greater_equal, ast.Eq: np.equal, ast.NotEq: np.not_equal,
            }[type(op)](a, b)
            return np.broadcast_to(res, idx.shape)
        if isinstance(node, ast.BoolOp):
            vals = [np.broadcast_to(np.asarray(self._eval(v, env, idx), dtype=bool), idx.shape)
                    for v in node.values]
            red = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
            return red.reduce(vals)
        if isinstance(node, ast.IfExp):
            cond = np.broadcast_to(np.asarray(self._eval(node.test, env, idx), dtype=bool), idx.shape)
            out = np.zeros(idx.shape, dtype=complex)
            if cond.any():
                out[cond] = self._eval(node.body, env, idx[cond])
            if (~cond).any():
                out[~cond] = self._eval(node.orelse, env, idx[~cond])
            return out
        raise ParseError(f"unsupported syntax {type(node).__name__}")  # pragma: no cover

    def __repr__(self):
        return f"Expression({self.source!r}, n={self.n})"
