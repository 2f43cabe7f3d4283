"""Basis transformations between Newton, Lagrange and canonical coefficients.

For fixed ``(A, P_A)`` the matrices satisfy::

    NL @ c_newton = c_lagrange = F        (NL lower triangular)
    LN = NL^-1                            (lower triangular)
    CN @ c_canonical = c_newton           (CN upper triangular)
    NC = CN^-1                            (upper triangular)
    V(P_A) = NL @ CN

Rows and columns follow the lexicographic order of ``A``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import solve_triangular

from .multiindex import MultiIndexSet, to_json_dict
from .newton import (InterpolationError, NewtonPolynomial, _divided_differences,
                     eval_newton_batch, newton_basis_matrix)
from .nodes import GeneratingNodes, UnisolventNodes


class SingularTransformError(ArithmeticError):
    """A triangular factor has a zero diagonal entry (repeated generating nodes)."""


def vandermonde(A: MultiIndexSet, nodes: UnisolventNodes) -> np.ndarray:
    """``V[alpha, beta] = p_alpha ** beta``."""
    pts = nodes.points
    V = np.ones((len(A), len(A)))
    for i in range(A.m):
        V *= pts[:, i][:, None] ** A.indices[:, i][None, :]
    return V


def _newton_table_1d(x: np.ndarray, deg: int) -> np.ndarray:
    """``T[a, j] = prod_{l<j} (x_a - x_l)``; exactly zero for ``j > a``."""
    T = np.zeros((deg + 1, deg + 1))
    T[:, 0] = 1.0
    for j in range(deg):
        T[:, j + 1] = T[:, j] * (x[:deg + 1] - x[j])
    return np.tril(T)


def _monomial_to_newton_1d(x: np.ndarray, deg: int) -> np.ndarray:
    """``C[j, b]``: coefficient of ``N_j`` in ``t**b``; upper triangular.

    Uses ``t * N_j = N_{j+1} + x_j N_j`` column by column.
    """
    C = np.zeros((deg + 1, deg + 1))
    C[0, 0] = 1.0
    for b in range(1, deg + 1):
        prev = C[:, b - 1]
        C[1:b + 1, b] = prev[:b]
        C[:b + 1, b] += x[:b + 1] * prev[:b + 1]
    return C


def build_NL(A: MultiIndexSet, nodes: UnisolventNodes) -> np.ndarray:
    """``NL[alpha, beta] = N_beta(p_alpha)`` from per-dimension prefix products."""
    NL = np.ones((len(A), len(A)))
    for i in range(A.m):
        deg = int(A.max_degrees[i])
        T = _newton_table_1d(nodes.gp[i], deg)
        col = A.indices[:, i]
        NL *= T[col[:, None], col[None, :]]
    return NL


def build_LN(A: MultiIndexSet, nodes: UnisolventNodes, NL: np.ndarray | None = None) -> np.ndarray:
    """Inverse of ``NL`` by forward substitution on unit vectors."""
    if NL is None:
        NL = build_NL(A, nodes)
    if np.any(np.diag(NL) == 0):
        raise SingularTransformError("NL is singular; generating nodes must be distinct")
    LN = solve_triangular(NL, np.eye(len(A)), lower=True)
    return np.tril(LN)


def build_CN(A: MultiIndexSet, nodes: UnisolventNodes) -> np.ndarray:
    """Column ``beta`` holds the Newton coefficients of the monomial ``x**beta``.

    The monomial and Newton bases are both tensor products, so the columns
    are products of the 1D monomial-to-Newton tables.
    """
    CN = np.ones((len(A), len(A)))
    for i in range(A.m):
        deg = int(A.max_degrees[i])
        C = _monomial_to_newton_1d(nodes.gp[i], deg)
        col = A.indices[:, i]
        CN *= C[col[:, None], col[None, :]]
    return CN


def build_NC(A: MultiIndexSet, nodes: UnisolventNodes, CN: np.ndarray | None = None) -> np.ndarray:
    """Inverse of ``CN`` by back substitution."""
    if CN is None:
        CN = build_CN(A, nodes)
    if np.any(np.diag(CN) == 0):
        raise SingularTransformError("CN is singular")
    NC = solve_triangular(CN, np.eye(len(A)), lower=False)
    return np.triu(NC)


@dataclass(frozen=True, eq=False)
class TransformSet:
    """The four transformation matrices for one fixed ``(A, P_A)``."""

    A: MultiIndexSet
    nodes: UnisolventNodes
    NL: np.ndarray
    LN: np.ndarray
    CN: np.ndarray
    NC: np.ndarray

    @classmethod
    def build(cls, nodes: UnisolventNodes) -> "TransformSet":
        A = nodes.A
        NL = build_NL(A, nodes)
        CN = build_CN(A, nodes)
        mats = dict(NL=NL, LN=build_LN(A, nodes, NL), CN=CN, NC=build_NC(A, nodes, CN))
        for M in mats.values():
            M.setflags(write=False)
        return cls(A=A, nodes=nodes, **mats)

    @property
    def V(self) -> np.ndarray:
        return vandermonde(self.A, self.nodes)

    def newton_to_canonical(self, c_newton) -> np.ndarray:
        return self.NC @ np.asarray(c_newton, dtype=float)

    def canonical_to_newton(self, c_can) -> np.ndarray:
        return self.CN @ np.asarray(c_can, dtype=float)

    def lagrange_to_newton(self, F) -> np.ndarray:
        return self.LN @ np.asarray(F, dtype=float)

    def newton_to_lagrange(self, c_newton) -> np.ndarray:
        return self.NL @ np.asarray(c_newton, dtype=float)

    def content_hash(self) -> str:
        return content_hash(self.A, self.nodes.gp)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "hash": self.content_hash(),
            "multiindex": to_json_dict(self.A),
            "gp": self.nodes.gp.to_json_dict(),
            **{k: getattr(self, k).tolist() for k in ("NL", "LN", "CN", "NC")},
        }


def content_hash(A: MultiIndexSet, gp: GeneratingNodes) -> str:
    """SHA-256 over the exact bytes of the index array and the generating nodes."""
    h = hashlib.sha256()
    h.update(np.int64(A.m).tobytes())
    h.update(A.indices.tobytes())
    for a in gp.per_dimension:
        h.update(np.int64(a.size).tobytes())
        h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
    return h.hexdigest()


def cached_transform(nodes: UnisolventNodes, cache_dir) -> TransformSet:
    """Load a :class:`TransformSet` from ``cache_dir`` or build and store it.

    Files are JSON bundles named by :func:`content_hash`; floats round-trip
    exactly through ``repr``.
    """
    cache_dir = Path(cache_dir)
    path = cache_dir / f"transform-{content_hash(nodes.A, nodes.gp)}.json"
    if path.exists():
        d = json.loads(path.read_text())
        mats = {k: np.array(d[k], dtype=float).reshape(len(nodes.A), len(nodes.A))
                for k in ("NL", "LN", "CN", "NC")}
        for M in mats.values():
            M.setflags(write=False)
        return TransformSet(A=nodes.A, nodes=nodes, **mats)
    T = TransformSet.build(nodes)
    cache_dir.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(T.to_json_dict()))
    tmp.replace(path)
    return T


def interpolate_fast(T: TransformSet, F) -> NewtonPolynomial:
    """Newton coefficients as ``LN @ F`` using the precomputed matrices."""
    F = np.asarray(F, dtype=float)
    if F.shape[0] != len(T.A):
        raise InterpolationError(f"expected {len(T.A)} values, got {F.shape[0]}")
    return NewtonPolynomial(T.A, T.nodes.gp, T.LN @ F)


def lagrange_basis_matrix(nodes: UnisolventNodes, xs, LN: np.ndarray | None = None) -> np.ndarray:
    """``(L_beta(x_k))`` for rows ``x_k`` of ``xs``, columns in lex order of ``A``."""
    if LN is None:
        LN = build_LN(nodes.A, nodes)
    return newton_basis_matrix(nodes.A, nodes.gp, xs) @ LN


def lagrange_eval(A: MultiIndexSet, nodes: UnisolventNodes, F, x):
    """Evaluate ``sum_alpha F_alpha L_alpha`` at ``x`` (a point or an array of points).

    The Lagrange form is converted to Newton form first.
    """
    F = np.asarray(F, dtype=float)
    if F.shape[0] != len(A):
        raise InterpolationError(f"expected {len(A)} values, got {F.shape[0]}")
    Q = NewtonPolynomial(A, nodes.gp, _divided_differences(A, nodes.gp, F))
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and x.shape[0] == A.m:
        return float(eval_newton_batch(Q, x[None, :])[0])
    return eval_newton_batch(Q, x)
