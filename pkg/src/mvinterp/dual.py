"""Maximal unisolvent subsets, vanishing ideals and regression on varieties.

Given nodes ``p_1, ..., p_l`` and a reference grid ``P_A``, the matrix
``R[i, beta] = L_beta(p_i)`` is reduced twice by Gaussian elimination with
partial pivoting: once on ``R`` (selecting nodes) and once on the transpose
of the resulting echelon factor (selecting Lagrange basis columns). The
selected ``k x k`` block is regular; the remaining columns span the
polynomials of ``Pi_A`` vanishing on every node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiindex import MultiIndexSet
from .newton import InterpolationError
from .nodes import UnisolventNodes
from .transform import build_LN, lagrange_basis_matrix

DEFAULT_RANK_TOL = 1e-10


class DegenerateInputError(ArithmeticError):
    """No node carries information (all Lagrange evaluations vanish)."""


def gepp_echelon(M: np.ndarray, tol: float):
    """Row-echelon reduction with partial pivoting.

    Columns whose remaining entries are all ``<= tol`` in modulus are
    skipped. Returns the original row indices chosen as pivots, the pivot
    columns, and the reduced matrix with its pivot rows moved to the top.
    """
    W = np.array(M, dtype=float, copy=True)
    nrows, ncols = W.shape
    rows = np.arange(nrows)
    piv_rows, piv_cols = [], []
    r0 = 0
    for j in range(ncols):
        if r0 == nrows:
            break
        i = r0 + int(np.argmax(np.abs(W[r0:, j])))
        if abs(W[i, j]) <= tol:
            continue
        if i != r0:
            W[[r0, i]] = W[[i, r0]]
            rows[[r0, i]] = rows[[i, r0]]
        piv_rows.append(int(rows[r0]))
        piv_cols.append(j)
        mult = W[r0 + 1:, j] / W[r0, j]
        W[r0 + 1:, j:] -= np.outer(mult, W[r0, j:])
        W[r0 + 1:, j] = 0.0
        r0 += 1
    return np.array(piv_rows, dtype=np.int64), np.array(piv_cols, dtype=np.int64), W


@dataclass(frozen=True, eq=False)
class DualDecomposition:
    """Result of :func:`dual_decompose`.

    ``interp_basis`` has shape ``(|A|, k)``: column ``i`` holds the reference
    Lagrange coefficients of ``rho_i`` with ``rho_i(P0[j]) = delta_ij``.
    ``kernel_basis`` has shape ``(|A|, |A| - k)``, columns normalized to unit
    max-norm, each vanishing on all input nodes.
    """

    A: MultiIndexSet
    reference: UnisolventNodes
    input_nodes: np.ndarray
    R: np.ndarray
    k: int
    p0_rows: np.ndarray
    basis_columns: np.ndarray
    interp_basis: np.ndarray
    kernel_basis: np.ndarray
    LN: np.ndarray

    @property
    def P0(self) -> np.ndarray:
        return self.input_nodes[self.p0_rows]

    @property
    def kernel_dimension(self) -> int:
        return self.kernel_basis.shape[1]


def dual_decompose(A: MultiIndexSet, reference: UnisolventNodes, input_nodes,
                   rank_tol: float = DEFAULT_RANK_TOL) -> DualDecomposition:
    """Split ``Pi_A`` into an interpolation space on a maximal node subset and a kernel.

    Pivots below ``rank_tol`` times the largest modulus of the current
    matrix count as zero.
    """
    X = np.atleast_2d(np.asarray(input_nodes, dtype=float))
    if X.shape[1] != A.m:
        raise InterpolationError(f"nodes have dimension {X.shape[1]}, expected {A.m}")
    N = len(A)
    LN = build_LN(A, reference)
    R = lagrange_basis_matrix(reference, X, LN)
    scale = np.abs(R).max(initial=0.0)
    if N == 0 or X.shape[0] == 0 or scale == 0.0:
        raise DegenerateInputError("all Lagrange evaluations vanish on the input nodes")

    rows, _, W = gepp_echelon(R, rank_tol * scale)
    k = rows.size
    U = W[:k]
    cols, _, _ = gepp_echelon(U.T, rank_tol * np.abs(U).max())
    if cols.size != k:
        # second pass disagrees on the rank; trust the smaller one
        k = cols.size
        rows = rows[:k]
    cols = np.sort(cols)

    R1 = R[np.ix_(rows, cols)]
    interp = np.zeros((N, k))
    interp[cols] = np.linalg.solve(R1, np.eye(k))

    free = np.setdiff1d(np.arange(N), cols)
    kernel = np.zeros((N, free.size))
    if free.size:
        kernel[cols] = np.linalg.solve(R1, -R[np.ix_(rows, free)])
        kernel[free, np.arange(free.size)] = 1.0
        kernel /= np.abs(kernel).max(axis=0, keepdims=True)
    return DualDecomposition(A=A, reference=reference, input_nodes=X, R=R, k=int(k),
                             p0_rows=rows, basis_columns=cols, interp_basis=interp,
                             kernel_basis=kernel, LN=LN)


@dataclass(frozen=True, eq=False)
class VarietyFit:
    coefficients: np.ndarray  # reference Lagrange coefficients
    kernel_basis: np.ndarray
    k: int
    residual_max: float
    residual_rms: float
    decomposition: DualDecomposition

    def newton_coefficients(self) -> np.ndarray:
        return self.decomposition.LN @ self.coefficients

    def __call__(self, xs) -> np.ndarray:
        ref = self.decomposition.reference
        return lagrange_basis_matrix(ref, np.atleast_2d(xs), self.decomposition.LN) @ self.coefficients


def variety_fit(A: MultiIndexSet, reference: UnisolventNodes, samples, values,
                rank_tol: float = DEFAULT_RANK_TOL) -> VarietyFit:
    """Least-squares fit ``R @ c ~ F`` restricted to the identified ``k``-dimensional subspace."""
    F = np.asarray(values, dtype=float).ravel()
    dec = dual_decompose(A, reference, samples, rank_tol)
    if F.size != dec.input_nodes.shape[0]:
        raise InterpolationError("need one value per sample")
    Rk = dec.R[:, dec.basis_columns]
    sol, *_ = np.linalg.lstsq(Rk, F, rcond=None)
    coeffs = np.zeros(len(A))
    coeffs[dec.basis_columns] = sol
    res = Rk @ sol - F
    return VarietyFit(coefficients=coeffs, kernel_basis=dec.kernel_basis, k=dec.k,
                      residual_max=float(np.abs(res).max(initial=0.0)),
                      residual_rms=float(np.sqrt(np.mean(res ** 2))) if res.size else 0.0,
                      decomposition=dec)


def torus_level_set(x, R: float = 0.7, r: float = 0.3) -> np.ndarray:
    """``(|x|^2 + R^2 - r^2)^2 - 4 R^2 (x^2 + y^2)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = (x ** 2).sum(axis=1)
    return (s + R * R - r * r) ** 2 - 4 * R * R * (x[:, 0] ** 2 + x[:, 1] ** 2)


def torus_canonical_coefficients(A: MultiIndexSet, R: float = 0.7, r: float = 0.3) -> np.ndarray:
    """Monomial coefficients of :func:`torus_level_set`, aligned with ``A`` (m = 3)."""
    if A.m != 3:
        raise ValueError("the torus lives in three dimensions")
    c0 = R * R - r * r
    terms = {
        (4, 0, 0): 1.0, (0, 4, 0): 1.0, (0, 0, 4): 1.0,
        (2, 2, 0): 2.0, (2, 0, 2): 2.0, (0, 2, 2): 2.0,
        (2, 0, 0): 2 * c0 - 4 * R * R, (0, 2, 0): 2 * c0 - 4 * R * R, (0, 0, 2): 2 * c0,
        (0, 0, 0): c0 * c0,
    }
    out = np.zeros(len(A))
    for alpha, c in terms.items():
        if alpha not in A:
            raise ValueError(f"monomial {alpha} of the level set is not in the set")
        out[A.position(alpha)] = c
    return out


def sample_torus(count: int, rng: np.random.Generator, R: float = 0.7, r: float = 0.3) -> np.ndarray:
    """Points ``((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`` with uniform angles."""
    u = rng.uniform(0.0, 2 * np.pi, count)
    v = rng.uniform(0.0, 2 * np.pi, count)
    return np.column_stack([(R + r * np.cos(v)) * np.cos(u),
                            (R + r * np.cos(v)) * np.sin(u),
                            r * np.sin(v)])


def torus_reference(A: MultiIndexSet, r: float = 0.3, leja: bool = True) -> UnisolventNodes:
    """Reference grid Cheb2nd x Cheb2nd x r*Cheb2nd of degree ``A.n``."""
    from .nodes import GeneratingNodes, generate_unisolvent

    n = int(A.n if A.n is not None else A.max_degrees.max())
    gp = GeneratingNodes.chebyshev(3, n, kind=2, leja=leja, scale=(1.0, 1.0, r))
    return generate_unisolvent(A, gp)
