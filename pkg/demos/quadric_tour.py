"""Quadric models s = z*Az + 2Re(z^t B z): inertia, normal forms and verdicts."""
import numpy as np

from crext.fixtures import bishop_model, one_negative_model, parabolic_model, split_model
from crext.quadric import QuadricModel, extension_verdict, inertia, normalize, real_form

np.set_printoptions(precision=4, suppress=True)

# the real 2n x 2n matrix of the quadric, coordinates (Re z, Im z)
m = split_model()
print("split model real form\n", real_form(m))
print("inertia", inertia(real_form(m)))

# the verdict only looks at the inertia of the real form
for name, model in [("split", m), ("one negative", one_negative_model()),
                    ("parabolic", parabolic_model(2)), ("bishop", bishop_model())]:
    v = extension_verdict(model)
    print(f"{name:>13}: {v.verdict.value:14s} a={v.a} b={v.b}")

# flipping s -> -s swaps the two sides
print("flipped one negative:", extension_verdict(one_negative_model().flipped()).verdict.value)

# a random positive definite A with a random symmetric B, brought to (I, diag(lambda))
rng = np.random.default_rng(0)
X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
A = X.conj().T @ X + np.eye(3)
Y = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
nf = normalize(QuadricModel(A, 0.5 * (Y + Y.T)))
print("invariants", np.round(nf.lambdas, 4), "flags", nf.parabolic, "residual %.1e" % nf.residual)
