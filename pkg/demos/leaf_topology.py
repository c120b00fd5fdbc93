"""Level sets {rho < s}: the inertia table against a grid count."""
import numpy as np

from crext.fixtures import hyperbolic_pair_model, oscillating_model
from crext.quadric import Inertia
from crext.topology import classify_quadric_leaf, sample_real_leaf, sample_leaf

# sum of k squares minus sum of l squares below the level s
for k, l in [(2, 1), (2, 2), (3, 1), (4, 0)]:
    for s in (-1.0, 1.0):
        C = np.diag([1.0] * k + [-1.0] * l)
        table = classify_quadric_leaf(Inertia(k, l, 0), int(s))
        grid = sample_real_leaf(C, s, resolution=48)
        print(f"k={k} l={l} s={s:+.0f}  table {table.counts()} pi1={table.pi1_rank}"
              f"  grid {grid.counts()} pi1={grid.pi1_rank}")

# one positive direction falls outside the table: two boundary components
print("hyperbolic pair", sample_leaf(hyperbolic_pair_model(1.0), 0.5, resolution=48).counts())

# a smooth but non-analytic model whose small leaves break into pieces
print("oscillating", sample_leaf(oscillating_model(), 1e-4, resolution=128).counts())
