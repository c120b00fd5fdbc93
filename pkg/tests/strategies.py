"""Random models, polynomials and points shared by the test modules."""
import numpy as np

from crext.formal import weighted_basis
from crext.poly import CPolynomial, SPolynomial, monomials
from crext.quadric import QuadricModel, real_form


def random_unitary(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(X)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_quadric(rng, n, a_min=2, b_scale=0.3, gap=0.05):
    """Pure quadric with at least ``a_min`` positive eigenvalues of A and Q well away from degenerate."""
    while True:
        npos = int(rng.integers(a_min, n + 1))
        signs = np.array([1.0] * npos + [-1.0] * (n - npos))
        U = random_unitary(rng, n)
        A = U @ np.diag(signs * rng.uniform(0.5, 2.0, n)) @ U.conj().T
        A = 0.5 * (A + A.conj().T)
        X = b_scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        model = QuadricModel(A, 0.5 * (X + X.T))
        ev = np.abs(np.linalg.eigvalsh(real_form(model)))
        if ev.min() > gap * ev.max():
            return model


def random_E(rng, n, scale=0.1, degrees=(3, 4)):
    """Real-valued higher-order terms with a few random monomials of each degree."""
    p = CPolynomial.zero(n)
    for d in degrees:
        for _ in range(3):
            a = int(rng.integers(0, d + 1))
            ma, mb = list(monomials(n, a)), list(monomials(n, d - a))
            za = ma[int(rng.integers(len(ma)))]
            zb = mb[int(rng.integers(len(mb)))]
            c = scale * complex(rng.standard_normal(), rng.standard_normal())
            p = p + CPolynomial.monomial(za, zb, c)
    return p + p.conj()


def random_weighted(rng, n, d):
    """Weighted homogeneous ``F(z, s)`` of weighted degree ``d`` with O(1) coefficients."""
    return SPolynomial(n, {
        k: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for k in weighted_basis(n, d)
    })


def random_jet_poly(rng, n, N):
    out = SPolynomial.zero(n)
    for d in range(N + 1):
        out = out + random_weighted(rng, n, d)
    return out


def point_above(rng, model, zmax=0.12, gap=(0.01, 0.06)):
    """Point ``(z, s)`` strictly on the side ``s > rho``."""
    n = model.n
    z = zmax * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) / np.sqrt(2)
    s = float(model.rho(z)) + rng.uniform(*gap)
    return z, s
