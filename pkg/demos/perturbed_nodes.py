"""Interpolating on randomly shaken Chebyshev grids.

Each interior node is moved by up to ``nu`` times the local spacing. The
interpolant on the shaken nodes is computed through the change-of-nodes
matrix, and the a-priori estimate ``s_n * baseline`` is printed next to the
measured error.
"""
from mvinterp.approx import run_perturbation_study, runge1

study = run_perturbation_study(2, 2, range(2, 21, 3), [0.0, 0.25, 1.0], seed=0, f=runge1)
print(f"{'n':>3} {'nu':>5} {'measured':>10} {'estimate':>10} {'s_inf':>7}")
for r in sorted(study.records, key=lambda r: (r.nu, r.n)):
    print(f"{r.n:3d} {r.nu:5.2f} {r.ap:10.2e} {r.est:10.2e} {r.s_inf:7.2f}")
