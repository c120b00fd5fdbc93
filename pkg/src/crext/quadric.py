"""CR singular quadric models ``s = A(z, zbar) + 2 Re B(z, z) + E(z, zbar)``.

The Hermitian form is ``A(z, zbar) = zbar^t A z`` and the bilinear form is
``B(z, z) = z^t B z`` with ``B`` symmetric.  A linear change of variables
``z = T w`` acts as ``A -> T^* A T`` and ``B -> T^t B T``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import ADegenerateError, InsufficientPositiveError, SamplingInconclusive
from .poly import CPolynomial

__all__ = [
    "ZERO_TOL",
    "QuadricModel",
    "NumericModel",
    "Inertia",
    "NormalForm",
    "LocusReport",
    "Verdict",
    "ExtensionVerdict",
    "inertia",
    "real_form",
    "is_q_nondegenerate",
    "cr_singular_locus",
    "normalize",
    "block_reduce_B",
    "extension_verdict",
    "takagi",
    "parabolic_flags",
]

#: relative eigenvalue threshold (times the spectral norm) for rank decisions
ZERO_TOL = 1e-9


class Inertia(NamedTuple):
    positive: int
    negative: int
    zero: int

    @property
    def dim(self):
        return self.positive + self.negative + self.zero


@dataclass(frozen=True, eq=False)
class QuadricModel:
    """The manifold ``s = Q(z, zbar) + E(z, zbar)`` in ``C^n x R``.

    ``A`` must be Hermitian.  ``B`` is symmetrized on construction, which does
    not change ``z^t B z``.  ``E`` is a real valued polynomial whose monomials
    all have degree at least three; ``None`` means the pure quadric.
    """

    A: np.ndarray
    B: np.ndarray
    E: CPolynomial | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        B = np.array(self.B, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValueError("A must be a nonempty square matrix")
        n = A.shape[0]
        if B.shape != (n, n):
            raise ValueError(f"B must be {n}x{n}")
        scale = max(1.0, float(np.abs(A).max()))
        if np.abs(A - A.conj().T).max() > 1e-12 * scale:
            raise ValueError("A is not Hermitian")
        A = 0.5 * (A + A.conj().T)
        B = 0.5 * (B + B.T)
        E = self.E
        if E is not None:
            if E.n != n:
                raise ValueError("E lives in a different dimension")
            if not E:
                E = None
            else:
                if E.valuation() < 3:
                    raise ValueError("every monomial of E must have degree >= 3")
                if not E.is_real_valued():
                    raise ValueError("E must be real valued")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "E", E)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.E is None

    def quadric(self) -> "QuadricModel":
        """The quadric model obtained by dropping ``E``."""
        return self if self.E is None else QuadricModel(self.A, self.B)

    def flipped(self) -> "QuadricModel":
        """The model seen from below: ``s -> -s``."""
        return QuadricModel(-self.A, -self.B, None if self.E is None else -self.E)

    def transformed(self, T) -> "QuadricModel":
        """Pull back through ``z = T w`` (only for pure quadrics)."""
        if self.E is not None:
            raise ValueError("linear change of variables is only applied to pure quadrics")
        T = np.asarray(T, dtype=complex)
        return QuadricModel(T.conj().T @ self.A @ T, T.T @ self.B @ T)

    # -- polynomial views ------------------------------------------------
    def q_poly(self) -> CPolynomial:
        if "q" not in self._cache:
            B = CPolynomial.bilinear(self.B)
            self._cache["q"] = CPolynomial.hermitian(self.A) + B + B.conj()
        return self._cache["q"]

    def rho_poly(self) -> CPolynomial:
        if "rho" not in self._cache:
            q = self.q_poly()
            self._cache["rho"] = q if self.E is None else q + self.E
        return self._cache["rho"]

    # -- numeric evaluation ---------------------------------------------
    def q(self, z):
        """Quadratic part at ``z`` (shape ``(..., n)``), real valued."""
        z = np.asarray(z, dtype=complex)
        herm = np.einsum("...j,jk,...k->...", z.conj(), self.A, z).real
        bil = np.einsum("...j,jk,...k->...", z, self.B, z)
        return herm + 2.0 * bil.real

    def rho(self, z):
        """Defining function ``Q + E`` at ``z``."""
        val = self.q(z)
        if self.E is not None:
            val = val + np.real(self.E(z))
        return val

    def grad_rho(self, z):
        """``d rho / d zbar_j`` at ``z``; the real gradient is ``2 * conj``-paired."""
        z = np.asarray(z, dtype=complex)
        g = np.einsum("jk,...k->...j", self.A.T, z) + 2.0 * np.einsum("jk,...k->...j", self.B, z).conj()
        if self.E is not None:
            dE = [self.E.dzbar(j) for j in range(self.n)]
            g = g + np.stack([np.asarray(d(z)) for d in dE], axis=-1)
        return g


@dataclass(frozen=True)
class NumericModel:
    """A graph ``s = rho(z)`` given by a vectorized callable (no polynomial structure).

    ``grad`` optionally returns ``d rho / d zbar_j`` with shape ``(..., n)``;
    central differences are used otherwise.
    """

    n: int
    rho_fn: Callable
    grad: Callable | None = None
    label: str = "numeric"

    def rho(self, z):
        return np.real(self.rho_fn(np.asarray(z, dtype=complex)))

    def grad_rho(self, z):
        z = np.asarray(z, dtype=complex)
        if self.grad is not None:
            return self.grad(z)
        h = 1e-6 * max(1.0, float(np.abs(z).max(initial=0.0)))
        out = np.empty(z.shape, dtype=complex)
        for j in range(self.n):
            e = np.zeros(self.n, dtype=complex)
            e[j] = h
            dx = (self.rho(z + e) - self.rho(z - e)) / (2 * h)
            dy = (self.rho(z + 1j * e) - self.rho(z - 1j * e)) / (2 * h)
            out[..., j] = 0.5 * (dx + 1j * dy)
        return out


# ---------------------------------------------------------------------------
# inertia and real form
# ---------------------------------------------------------------------------
def inertia(form, zero_tol: float = ZERO_TOL) -> Inertia:
    """Count eigenvalues above, below and within ``zero_tol * ||form||`` of zero.

    ``form`` is any Hermitian (complex) or real symmetric matrix.
    """
    M = np.asarray(form)
    if M.size == 0:
        return Inertia(0, 0, 0)
    w = np.linalg.eigvalsh(M)
    scale = float(np.abs(w).max())
    if scale == 0.0:
        return Inertia(0, 0, len(w))
    thr = zero_tol * scale
    return Inertia(int((w > thr).sum()), int((w < -thr).sum()), int((np.abs(w) <= thr).sum()))


def real_form(model: QuadricModel) -> np.ndarray:
    """Real symmetric ``2n x 2n`` matrix ``C`` with ``x^t C x = Q(z, zbar)``.

    Coordinates are ``x = (Re z, Im z)``.
    """
    Ar, Ai = model.A.real, model.A.imag
    Br, Bi = model.B.real, model.B.imag
    C = np.block([[Ar + 2 * Br, -Ai - 2 * Bi], [Ai - 2 * Bi, Ar - 2 * Br]])
    return 0.5 * (C + C.T)


def is_q_nondegenerate(model: QuadricModel, zero_tol: float = ZERO_TOL) -> bool:
    return inertia(real_form(model), zero_tol).zero == 0


# ---------------------------------------------------------------------------
# CR singular locus
# ---------------------------------------------------------------------------
@dataclass
class LocusReport:
    isolated: bool
    kernel: np.ndarray | None = None  # real basis (columns, in (Re z, Im z)) for pure quadrics
    points: np.ndarray | None = None  # polished off-origin singular points (complex, (k, n))
    radii: list = field(default_factory=list)  # distinct radii of the detected points
    includes_origin: bool = True
    method: str = "exact"
    confidence: float = 1.0

    def summary(self) -> dict:
        out = {"isolated": self.isolated, "method": self.method, "includes_origin": self.includes_origin}
        if self.kernel is not None:
            out["kernel_dimension"] = int(self.kernel.shape[1])
        if self.points is not None:
            out["points_found"] = int(len(self.points))
            out["radii"] = [round(float(r), 8) for r in self.radii]
        out["confidence"] = self.confidence
        return out


def _null_space(C, zero_tol):
    u, sv, vt = np.linalg.svd(C)
    scale = sv.max() if sv.size and sv.max() > 0 else 1.0
    mask = sv <= zero_tol * scale
    return vt[mask].T


def _real_grad(model, z):
    # real gradient in (Re z, Im z) of a real function f is 2 * (Re f_zbar, Im f_zbar)
    g = model.grad_rho(z)
    return 2.0 * np.concatenate([g.real, g.imag], axis=-1)


def cr_singular_locus(
    model,
    box: float = 1.0,
    *,
    inner: float | None = None,
    rays: int = 256,
    samples: int = 400,
    grad_tol: float = 1e-10,
    band: float = 1e3,
    seed: int = 0,
    zero_tol: float = ZERO_TOL,
) -> LocusReport:
    """Locate CR singular points, where every ``d rho / d zbar_j`` vanishes.

    For pure quadrics the answer is the kernel of the real form (exact linear
    algebra).  Otherwise points are found by scanning ``rays`` rays from the
    origin in the punctured box ``inner < |x| < box`` for sign changes of the
    radial derivative, then polishing with Gauss-Newton on the real gradient.
    Candidates whose gradient cannot be pushed below ``grad_tol`` but stays
    within ``band * grad_tol`` raise :class:`SamplingInconclusive`.
    """
    if isinstance(model, QuadricModel) and model.is_pure:
        K = _null_space(real_form(model), zero_tol)
        return LocusReport(isolated=K.shape[1] == 0, kernel=K, method="exact")

    n = model.n
    m = 2 * n
    inner = box / 10 if inner is None else inner
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((rays, m))
    if m == 2:
        th = np.linspace(0, 2 * np.pi, rays, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.linspace(inner, box, samples)
    pts = radii[None, :, None] * dirs[:, None, :]
    zc = pts[..., :n] + 1j * pts[..., n:]
    radial = np.einsum("rsk,rk->rs", _real_grad(model, zc), dirs)
    sign = np.sign(radial)
    ri, si = np.nonzero(sign[:, :-1] * sign[:, 1:] < 0)

    found, inconclusive = [], 0
    for r_idx, s_idx in zip(ri, si):
        a, b = radii[s_idx], radii[s_idx + 1]
        fa = radial[r_idx, s_idx]
        # bisection on the radial derivative along the ray
        for _ in range(60):
            mid = 0.5 * (a + b)
            x = mid * dirs[r_idx]
            fm = _real_grad(model, x[:n] + 1j * x[n:]) @ dirs[r_idx]
            if np.sign(fm) == np.sign(fa):
                a, fa = mid, fm
            else:
                b = mid
        x = 0.5 * (a + b) * dirs[r_idx]
        x, gnorm = _polish(model, x, grad_tol)
        if np.linalg.norm(x) < 0.5 * inner:
            continue  # polished back onto the origin, which is reported separately
        if gnorm <= grad_tol:
            found.append(x)
        elif gnorm <= band * grad_tol:
            inconclusive += 1
    if inconclusive and not found:
        raise SamplingInconclusive(
            f"{inconclusive} gradient minima within the tolerance band", count=inconclusive
        )
    origin_grad = float(np.linalg.norm(_real_grad(model, np.zeros(n, dtype=complex))))
    includes_origin = origin_grad <= grad_tol
    if found:
        P = np.array(found)
        pts_c = P[:, :n] + 1j * P[:, n:]
        rad = np.sort(np.linalg.norm(P, axis=1))
        clusters = [rad[0]]
        for r in rad[1:]:
            if r - clusters[-1] > 1e-6 * max(1.0, r):
                clusters.append(r)
    else:
        pts_c = np.zeros((0, n), dtype=complex)
        clusters = []
    total = len(ri)
    conf = 1.0 if total == 0 else 1.0 - inconclusive / total
    return LocusReport(
        isolated=len(found) == 0,
        points=pts_c,
        radii=[float(r) for r in clusters],
        includes_origin=includes_origin,
        method="sampling",
        confidence=conf,
    )


def _polish(model, x, grad_tol, iters=30):
    n = model.n
    m = 2 * n
    g = _real_grad(model, x[:n] + 1j * x[n:])
    for _ in range(iters):
        gn = float(np.linalg.norm(g))
        if gn <= grad_tol:
            break
        h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
        H = np.empty((m, m))
        for i in range(m):
            e = np.zeros(m)
            e[i] = h
            gp = _real_grad(model, (x + e)[:n] + 1j * (x + e)[n:])
            gm = _real_grad(model, (x - e)[:n] + 1j * (x - e)[n:])
            H[:, i] = (gp - gm) / (2 * h)
        step = np.linalg.lstsq(H, -g, rcond=1e-10)[0]
        x_new = x + step
        g_new = _real_grad(model, x_new[:n] + 1j * x_new[n:])
        if np.linalg.norm(g_new) >= gn:
            # damped retry
            x_new = x + 0.5 * step
            g_new = _real_grad(model, x_new[:n] + 1j * x_new[n:])
            if np.linalg.norm(g_new) >= gn:
                break
        x, g = x_new, g_new
    return x, float(np.linalg.norm(g))


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------
def takagi(B, tol: float = 1e-13):
    """Takagi factorization ``B = W diag(sigma) W^t`` of a complex symmetric matrix.

    Uses the real symmetric embedding ``[[Re B, Im B], [Im B, -Re B]]``: an
    eigenvector ``(u, v)`` with eigenvalue ``sigma >= 0`` gives a column
    ``w = u + i v`` with ``B conj(w) = sigma w``.  Columns are ordered by
    decreasing ``sigma`` and signed so the first non-negligible entry has
    positive real part.
    """
    B = np.asarray(B, dtype=complex)
    n = B.shape[0]
    R, I = B.real, B.imag
    H = np.block([[R, I], [I, -R]])
    w, V = np.linalg.eigh(0.5 * (H + H.T))
    order = np.argsort(-w)
    w, V = w[order], V[:, order]
    scale = max(float(np.abs(w).max()) if w.size else 0.0, 1.0)
    pos = w > tol * scale
    Wpos = V[:n, pos] + 1j * V[n:, pos]
    sig = list(w[pos])
    k = Wpos.shape[1]
    if k < n:
        # complete to a unitary; the complement spans the zero singular vectors
        Qfull, _ = np.linalg.qr(np.concatenate([Wpos, np.eye(n, dtype=complex)], axis=1))
        comp = Qfull[:, k:n]
        comp = comp - Wpos @ (Wpos.conj().T @ comp)
        comp, _ = np.linalg.qr(comp)
        W = np.concatenate([Wpos, comp[:, : n - k]], axis=1)
        sig += [0.0] * (n - k)
    else:
        W = Wpos
    for j in range(n):
        col = W[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-8))
        if col[idx].real < 0 or (col[idx].real == 0 and col[idx].imag < 0):
            W[:, j] = -col
    return W, np.array(sig)


@dataclass(frozen=True)
class NormalForm:
    """Result of a linear normalization ``z = T w``.

    ``A_normal = T^* A T`` and ``B_normal = T^t B T``.  ``lambdas`` is filled
    when ``B_normal`` is diagonal on the reduced block.
    """

    transform: np.ndarray
    A_normal: np.ndarray
    B_normal: np.ndarray
    lambdas: tuple
    residual: float
    signs: tuple
    parabolic: tuple = ()

    def to_json(self):
        def cm(M):
            return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(M)]

        return {
            "transform": cm(self.transform),
            "A_normal": cm(self.A_normal),
            "B_normal": cm(self.B_normal),
            "lambdas": [float(x) for x in self.lambdas],
            "signs": list(self.signs),
            "residual": float(self.residual),
            "parabolic": list(self.parabolic),
        }


def parabolic_flags(lambdas, zero_tol: float = ZERO_TOL):
    """Classify each Bishop-type invariant against the parabolic value 1/2."""
    out = []
    for lam in lambdas:
        if abs(lam - 0.5) <= zero_tol * max(1.0, abs(lam)):
            out.append("PARABOLIC_BOUNDARY")
        elif lam < 0.5:
            out.append("elliptic")
        else:
            out.append("hyperbolic")
    return tuple(out)


def _diagonalize_A(A, zero_tol):
    """T0 with T0^* A T0 = diag(+1.., -1.., 0..); identity-preserving when A already is."""
    n = A.shape[0]
    d = np.real(np.diag(A))
    scale = max(float(np.abs(np.linalg.eigvalsh(A)).max()), 1e-300)
    offdiag = A - np.diag(np.diag(A))
    if np.abs(offdiag).max(initial=0.0) == 0 and np.all(
        (np.abs(np.abs(d) - 1) <= 1e-14) | (np.abs(d) <= zero_tol * scale)
    ):
        vals, U = d.copy(), np.eye(n, dtype=complex)
    else:
        vals, U = np.linalg.eigh(A)
    # positive first (stable), then negative, then zero
    thr = zero_tol * scale
    cls = np.where(vals > thr, 0, np.where(vals < -thr, 1, 2))
    order = np.argsort(cls, kind="stable")
    vals, U, cls = vals[order], U[:, order], cls[order]
    scal = np.where(cls == 2, 1.0, 1.0 / np.sqrt(np.abs(np.where(cls == 2, 1.0, vals))))
    T0 = U * scal[None, :]
    signs = tuple(int(s) for s in np.where(cls == 0, 1, np.where(cls == 1, -1, 0)))
    return T0, signs


def normalize(model: QuadricModel, zero_tol: float = ZERO_TOL) -> NormalForm:
    """Bring ``A`` to ``diag(+-1)``; if ``A > 0`` also bring ``B`` to ``diag(lambda >= 0)``."""
    A, B = model.A, model.B
    if inertia(A, zero_tol).zero:
        raise ADegenerateError("A has zero eigenvalues")
    T0, signs = _diagonalize_A(A, zero_tol)
    B1 = T0.T @ B @ T0
    if all(s == 1 for s in signs):
        W, sig = takagi(B1)
        T = T0 @ W.conj()
        lambdas = tuple(float(x) for x in sig)
    else:
        T = T0
        lambdas = ()
    An = T.conj().T @ A @ T
    Bn = T.T @ B @ T
    target_A = np.diag(np.array(signs, dtype=complex))
    res = float(np.abs(An - target_A).max())
    if lambdas:
        res = max(res, float(np.abs(Bn - np.diag(lambdas)).max()))
    return NormalForm(T, An, Bn, lambdas, res, signs, parabolic_flags(lambdas, zero_tol))


def block_reduce_B(model: QuadricModel, zero_tol: float = ZERO_TOL) -> NormalForm:
    """Diagonalize ``A`` and then Takagi-reduce the upper-left 2x2 block of ``B``.

    The 2x2 unitary acts only on the first two coordinates, where ``A`` is the
    identity, so ``A`` is unchanged there.
    """
    A = model.A
    T0, signs = _diagonalize_A(A, zero_tol)
    if sum(1 for s in signs if s == 1) < 2:
        raise InsufficientPositiveError("A needs at least two positive eigenvalues")
    B1 = T0.T @ model.B @ T0
    W, sig = takagi(B1[:2, :2])
    T2 = np.eye(model.n, dtype=complex)
    T2[:2, :2] = W.conj()
    T = T0 @ T2
    An = T.conj().T @ A @ T
    Bn = T.T @ model.B @ T
    lambdas = (float(sig[0]), float(sig[1]))
    res = max(
        float(np.abs(An - np.diag(np.array(signs, dtype=complex))).max()),
        float(np.abs(Bn[:2, :2] - np.diag(lambdas)).max()),
    )
    return NormalForm(T, An, Bn, lambdas, res, signs, parabolic_flags(lambdas, zero_tol))


# ---------------------------------------------------------------------------
# extension verdict
# ---------------------------------------------------------------------------
class Verdict(str, enum.Enum):
    EXTENDS_UP = "ExtendsUp"
    EXTENDS_DOWN = "ExtendsDown"
    BOTH = "Both"
    INCONCLUSIVE = "Inconclusive"
    Q_DEGENERATE = "QDegenerate"


@dataclass(frozen=True)
class ExtensionVerdict:
    verdict: Verdict
    a: int
    b: int
    q_nondegenerate: bool
    n: int
    note: str = ""

    @property
    def up(self):
        return self.verdict in (Verdict.EXTENDS_UP, Verdict.BOTH)

    @property
    def down(self):
        return self.verdict in (Verdict.EXTENDS_DOWN, Verdict.BOTH)

    def to_json(self):
        return {
            "verdict": self.verdict.value,
            "a": self.a,
            "b": self.b,
            "q_nondegenerate": self.q_nondegenerate,
            "note": self.note,
        }


def extension_verdict(model: QuadricModel, zero_tol: float = ZERO_TOL) -> ExtensionVerdict:
    """Decide to which sides smooth CR functions are guaranteed to extend.

    Needs ``Q`` nondegenerate; then the side ``s >= rho`` needs two positive
    eigenvalues of ``A`` and the side ``s <= rho`` two negative ones.
    """
    ia = inertia(model.A, zero_tol)
    a, b = ia.positive, ia.negative
    nondeg = is_q_nondegenerate(model, zero_tol)
    if not nondeg:
        return ExtensionVerdict(
            Verdict.Q_DEGENERATE, a, b, False, model.n,
            "Q is degenerate: the CR singularity is not isolated and the extension theorem does not apply",
        )
    up, down = a >= 2, b >= 2
    if up and down:
        v, note = Verdict.BOTH, "a >= 2 and b >= 2: extension to a full neighborhood"
    elif up:
        v, note = Verdict.EXTENDS_UP, "a >= 2: extension to s >= rho"
    elif down:
        v, note = Verdict.EXTENDS_DOWN, "b >= 2: extension to s <= rho"
    else:
        v = Verdict.INCONCLUSIVE
        note = (
            "fewer than two eigenvalues of either sign; counterexamples of the form "
            "s = |z1|^2 - |z2|^2 (neither side) and s = |z1|^2 + |z2|^2 - |z3|^2 "
            "(one side only) show no extension is guaranteed"
        )
    return ExtensionVerdict(v, a, b, True, model.n, note)
