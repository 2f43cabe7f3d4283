"""Sampled Lebesgue constants of the interpolation nodes.

In one dimension the sampled constant tracks the logarithmic Chebyshev
formula closely. On l2 and l1 index sets in two dimensions it grows much
faster than the square of the 1D value, while the full tensor grid (l-inf)
stays below it.
"""
import numpy as np

from mvinterp import build_complete_set, default_nodes
from mvinterp.approx import lebesgue_1d_formula, lebesgue_estimate

for n in (5, 10, 50):
    A = build_complete_set(1, n, 1)
    print(f"1D n={n:2d}: sampled {lebesgue_estimate(A, default_nodes(A)).value:.4f}"
          f"  formula {lebesgue_1d_formula(n):.4f}")

print(f"\n{'n':>3} {'p=1':>8} {'p=2':>8} {'p=inf':>8} {'1D^2':>8}")
for n in (4, 8, 16):
    vals = []
    for p in (1, 2, np.inf):
        A = build_complete_set(2, n, p)
        vals.append(lebesgue_estimate(A, default_nodes(A)).value)
    print(f"{n:3d} " + " ".join(f"{v:8.2f}" for v in vals) + f" {lebesgue_1d_formula(n) ** 2:8.2f}")
