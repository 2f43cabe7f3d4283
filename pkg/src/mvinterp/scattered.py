"""Interpolation on arbitrary given node sets through a change-of-nodes matrix."""

from __future__ import annotations

from dataclasses import dataclass

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .multiindex import MultiIndexSet
from .newton import InterpolationError, NewtonPolynomial
from .nodes import UnisolventNodes
from .transform import build_LN, lagrange_basis_matrix

SINGULARITY_THRESHOLD = 1.0 / (50.0 * np.finfo(float).eps)


class NotUnisolventError(ArithmeticError):
    """The given nodes do not determine a unique interpolant in ``Pi_A``."""

    def __init__(self, message, condition_estimate=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


@dataclass(frozen=True, eq=False)
class ScatteredSystem:
    A: MultiIndexSet
    reference: UnisolventNodes
    given_nodes: np.ndarray
    R: np.ndarray
    S: np.ndarray
    s_inf: float
    condition_estimate: float
    LN: np.ndarray

    def polynomial(self, c_lag) -> NewtonPolynomial:
        """Newton form of ``sum_alpha c_alpha L_alpha`` (reference Lagrange basis)."""
        return NewtonPolynomial(self.A, self.reference.gp, self.LN @ np.asarray(c_lag, dtype=float))


def build_scattered(A: MultiIndexSet, reference: UnisolventNodes, given_nodes,
                    threshold: float = SINGULARITY_THRESHOLD) -> ScatteredSystem:
    """Assemble ``R[alpha, beta] = L_beta(given_alpha)`` and ``S = R^-1``.

    ``R`` is factored by LU with partial pivoting. The ratio of the largest to
    the smallest pivot serves as condition estimate; above ``threshold`` the
    nodes are rejected with :class:`NotUnisolventError`.
    """
    given = np.atleast_2d(np.asarray(given_nodes, dtype=float))
    if given.shape != (len(A), A.m):
        raise InterpolationError(f"expected {len(A)} given nodes of dimension {A.m}, "
                                 f"got array of shape {given.shape}")
    LN = build_LN(A, reference)
    R = lagrange_basis_matrix(reference, given, LN)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(R, check_finite=True)
    pivots = np.abs(np.diag(lu))
    pmin = pivots.min()
    cond = np.inf if pmin == 0 else float(pivots.max() / pmin)
    if not cond <= threshold:
        raise NotUnisolventError(
            f"given nodes are not unisolvent (pivot ratio {cond:.3g} > {threshold:.3g})", cond)
    S = lu_solve((lu, piv), np.eye(len(A)))
    s_inf = float(np.abs(S).sum(axis=1).max())
    for M in (R, S):
        M.setflags(write=False)
    return ScatteredSystem(A=A, reference=reference, given_nodes=given, R=R, S=S,
                           s_inf=s_inf, condition_estimate=cond, LN=LN)


def interpolate_scattered(sys: ScatteredSystem, F) -> np.ndarray:
    """Lagrange coefficients (w.r.t. the reference nodes) ``S @ F``."""
    F = np.asarray(F, dtype=float)
    if F.shape[0] != len(sys.A):
        raise InterpolationError(f"expected {len(sys.A)} values, got {F.shape[0]}")
    return sys.S @ F


def scattered_error_factor(sys: ScatteredSystem, lebesgue_reference: float) -> float:
    """``s_n = 1 + ||S||_inf * Lambda(P_A)``."""
    if lebesgue_reference < 1:
        raise ValueError("a Lebesgue constant is at least 1")
    return 1.0 + sys.s_inf * float(lebesgue_reference)


def perturb_grid(points, amplitude: float, rng: np.random.Generator) -> np.ndarray:
    """Move every coordinate by ``rho * dist(x, {-1, 1})`` with ``rho ~ U[-nu, nu]``.

    Boundary coordinates stay on the boundary since their distance is 0.
    """
    if not 0.0 <= amplitude <= 1.0:
        raise ValueError("perturbation amplitude must lie in [0, 1]")
    pts = np.asarray(points, dtype=float)
    dist = 1.0 - np.abs(pts)
    rho = rng.uniform(-amplitude, amplitude, size=pts.shape)
    return pts + rho * dist
