"""Interpolating 1 / (1 + 10|x|^2) in two dimensions.

Run with ``python3 demos/runge_convergence.py``. The script builds the
l2-degree index set for growing n, interpolates on the Leja-ordered
Chebyshev subgrid and fits an exponential rate to the observed errors.
The l1 set is shown for comparison; its rate is visibly slower.
"""
import numpy as np

from mvinterp import build_complete_set, default_nodes, divided_differences, eval_newton_batch
from mvinterp.approx import fit_rate, run_convergence, runge10

# a single interpolant first, to show the moving parts
A = build_complete_set(2, 20, 2)
P = default_nodes(A)
Q = divided_differences(A, P, runge10(P.points))
xs = np.random.default_rng(0).uniform(-1, 1, (1000, 2))
print(f"|A_2,20,2| = {len(A)} nodes, max error {np.abs(eval_newton_batch(Q, xs) - runge10(xs)).max():.2e}")

for p in (2, 1):
    recs = run_convergence(runge10, 2, p, range(2, 41))
    fit = fit_rate(recs)
    print(f"\np = {p}: error ~ {fit.c:.2f} * {fit.rho:.3f}^-n   (R^2 = {fit.r_squared:.3f})")
    for r in recs[::6]:
        print(f"  n={r.n:3d}  |A|={r.node_count:5d}  max error={r.max_error:.2e}")
