"""Recovering a torus from samples, then fitting a function on it.

Points sampled on the torus with radii 0.7 and 0.3 leave exactly one
degree-4 polynomial (up to scale) vanishing on all of them. The dual
decomposition finds it as the kernel; converting to monomials shows the
familiar quartic. Afterwards a Runge function restricted to the torus is
fitted by least squares on the unisolvent part.
"""
import numpy as np

from mvinterp import build_complete_set
from mvinterp.approx import runge10
from mvinterp.dual import (dual_decompose, sample_torus, torus_canonical_coefficients,
                           torus_reference, variety_fit)
from mvinterp.transform import TransformSet

A = build_complete_set(3, 4, 2)
ref = torus_reference(A)
X = sample_torus(int(1.5 * len(A)), np.random.default_rng(1))
dec = dual_decompose(A, ref, X)
print(f"{X.shape[0]} samples, |A| = {len(A)}, rank k = {dec.k}, kernel dimension = {dec.kernel_dimension}")

T = TransformSet.build(ref)
c = T.NC @ T.LN @ dec.kernel_basis[:, 0]
c /= c[np.argmax(np.abs(c))]
exact = torus_canonical_coefficients(A)
exact /= exact[np.argmax(np.abs(exact))]
for alpha, v in zip(A, c):
    if abs(v) > 1e-8:
        print(f"  x^{alpha[0]} y^{alpha[1]} z^{alpha[2]}: {v:+.6f}")
print(f"max deviation from the exact quartic: {np.abs(c - exact).max():.1e}")

print("\nRunge function on the torus")
for n in range(2, 9):
    An = build_complete_set(3, n, 2)
    rng = np.random.default_rng([0, n])
    Xn = sample_torus(int(1.5 * len(An)), rng)
    fit = variety_fit(An, torus_reference(An), Xn, runge10(Xn))
    Y = sample_torus(200, rng)
    print(f"  n={n}  k={fit.k:4d}  held-out error={np.abs(fit(Y) - runge10(Y)).max():.2e}")
