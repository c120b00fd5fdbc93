"""Extending boundary data off the manifold with Cauchy integrals on attached discs."""
import numpy as np

from crext.discs import disc_through
from crext.extend import BoundaryData, cauchy_eval, extend_at_point
from crext.fixtures import data_for, one_negative_model
from crext.formal import compose, formal_jet
from crext.poly import SPolynomial

m = one_negative_model()  # |z1|^2 + |z2|^2 - |z3|^2
z = np.array([0.1, 0.05, 0.8])
s = -0.5

# the disc through (z, s) is round: every boundary node lies on the manifold
disc = disc_through((z, s), m)
print("radius^2 %.4f  boundary residual %.1e" % (disc.radius_sq, disc.boundary_residual))

# flat data exp(-1/s^2)/z3 for s < 0, zero for s >= 0; its extension is the same formula
data = data_for("one_negative")
cv = cauchy_eval(data, disc, 0.0)
print("Cauchy value", cv.value, "expected", np.exp(-1 / s**2) / z[2], "est", cv.est_error)

# the other elliptic direction gives the same value
res = extend_at_point(data, m, (z, s), variant=1)
print("variant 1   ", res.value, "method", res.method)

# polynomial data: the formal jet and the numeric extension agree
F = SPolynomial.z(3, 0) ** 2 + SPolynomial.s(3) * SPolynomial.z(3, 2)
f = compose(F, m)
jet = formal_jet(f, m, 3)
num = extend_at_point(BoundaryData.from_cpolynomial(f), m, (z, s))
print("formal %.12f  numeric %.12f" % (jet(z, s).real, num.value.real))
