"""One-dimensional node families and unisolvent node grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .multiindex import MultiIndexSet

# relative slack when comparing Leja log-products for ties
_LEJA_TIE_TOL = 1e-12


class NodeError(ValueError):
    """Raised for invalid generating nodes."""


def chebyshev_first(n: int) -> np.ndarray:
    """Chebyshev nodes of the first kind, ``cos((2k-1) pi / (2(n+1)))``, k = 1..n+1."""
    if n < 0:
        raise NodeError("degree must be non-negative")
    k = np.arange(1, n + 2)
    # cos(t) written as sin(pi/2 - t): exactly antisymmetric, exact zero at the center
    return np.sin(np.pi * (n + 2 - 2 * k) / (2 * (n + 1)))


def chebyshev_second(n: int) -> np.ndarray:
    """Chebyshev extreme points ``cos(k pi / n)``, k = 0..n.

    ``n = 0`` returns ``[1.0]`` by convention.
    """
    if n < 0:
        raise NodeError("degree must be non-negative")
    if n == 0:
        return np.array([1.0])
    k = np.arange(n + 1)
    # same sin rewrite as above; hits 0 and +-1 exactly
    return np.sin(np.pi * (n - 2 * k) / (2 * n))


def leja_order(points: Sequence[float]) -> np.ndarray:
    """Reorder distinct points in Leja order.

    The first point has maximal modulus; each following point maximizes
    the product of distances to the points already chosen. Ties go to the
    larger value, then to the lower original position. Products are
    compared as sums of logarithms.
    """
    pts = np.asarray(points, dtype=float).ravel()
    if pts.size == 0:
        raise NodeError("need at least one point")
    if np.unique(pts).size != pts.size:
        raise NodeError("Leja ordering requires pairwise distinct points")
    remaining = list(range(pts.size))
    score = np.abs(pts).astype(float)
    score = np.where(score > 0, np.log(np.where(score > 0, score, 1.0)), -np.inf)
    order = []
    logprod = np.zeros(pts.size)
    for step in range(pts.size):
        cand = np.array(remaining)
        s = score[cand] if step == 0 else logprod[cand]
        best = np.max(s)
        if np.isfinite(best):
            tied = cand[s >= best - _LEJA_TIE_TOL * max(1.0, abs(best))]
        else:
            tied = cand[s == best]
        # larger signed value first, then lower original index
        pick = tied[np.lexsort((tied, -pts[tied]))[0]]
        order.append(int(pick))
        remaining.remove(pick)
        with np.errstate(divide="ignore"):
            logprod += np.log(np.abs(pts - pts[pick]))
    return pts[order]


@dataclass(frozen=True, eq=False)
class GeneratingNodes:
    """Per-dimension 1D node sequences ``P_1, ..., P_m``.

    Values are kept in one place; unisolvent grids index into them, so grid
    coordinates are bit-identical to the generating values.
    """

    per_dimension: tuple
    unscaled: bool = False

    def __post_init__(self):
        arrs = []
        for i, p in enumerate(self.per_dimension):
            a = np.array(p, dtype=float).ravel()
            if a.size == 0:
                raise NodeError(f"dimension {i + 1} has no nodes")
            if np.unique(a).size != a.size:
                raise NodeError(f"dimension {i + 1} has repeated nodes")
            if not self.unscaled and np.any(np.abs(a) > 1.0):
                raise NodeError(f"dimension {i + 1} has nodes outside [-1, 1]; "
                                "pass unscaled=True to allow this")
            a.setflags(write=False)
            arrs.append(a)
        object.__setattr__(self, "per_dimension", tuple(arrs))

    @property
    def m(self) -> int:
        return len(self.per_dimension)

    def __getitem__(self, i) -> np.ndarray:
        return self.per_dimension[i]

    def lengths(self) -> np.ndarray:
        return np.array([a.size for a in self.per_dimension])

    @classmethod
    def chebyshev(cls, m: int, n, kind: int = 2, leja: bool = True,
                  scale: Sequence[float] | None = None) -> "GeneratingNodes":
        """Chebyshev nodes per dimension, Leja-ordered by default.

        ``n`` is a degree or a sequence of per-dimension degrees; ``scale``
        multiplies dimension ``i`` by ``scale[i]`` after ordering.
        """
        degrees = [int(n)] * m if np.ndim(n) == 0 else [int(d) for d in n]
        if len(degrees) != m:
            raise NodeError("need one degree per dimension")
        gen = {1: chebyshev_first, 2: chebyshev_second}[kind]
        out = []
        for i, d in enumerate(degrees):
            x = gen(d)
            if leja:
                x = leja_order(x)
            if scale is not None:
                x = x * float(scale[i])
            out.append(x)
        unscaled = scale is not None and any(abs(float(s)) > 1 for s in scale)
        return cls(tuple(out), unscaled=unscaled)

    def to_json_dict(self) -> dict:
        return {"per_dimension": [a.tolist() for a in self.per_dimension],
                "unscaled": self.unscaled}

    @classmethod
    def from_json_dict(cls, d: dict) -> "GeneratingNodes":
        return cls(tuple(d["per_dimension"]), unscaled=bool(d.get("unscaled", False)))


@dataclass(frozen=True, eq=False)
class UnisolventNodes:
    """Grid-subsampled node set ``P_A``; row ``k`` belongs to the k-th index of ``A``."""

    A: MultiIndexSet
    gp: GeneratingNodes
    points: np.ndarray

    def __len__(self):
        return len(self.A)

    @property
    def m(self) -> int:
        return self.A.m


def generate_unisolvent(A: MultiIndexSet, gp: GeneratingNodes) -> UnisolventNodes:
    """Nodes ``p_alpha = (P_1[alpha_1], ..., P_m[alpha_m])`` for all ``alpha`` in ``A``."""
    if gp.m != A.m:
        raise NodeError(f"generating nodes have dimension {gp.m}, set has {A.m}")
    need = A.max_degrees + 1
    have = gp.lengths()
    short = np.nonzero(have < need)[0]
    if short.size:
        i = int(short[0])
        raise NodeError(f"dimension {i + 1} needs {need[i]} generating nodes, got {have[i]}")
    pts = np.empty((len(A), A.m))
    for i in range(A.m):
        pts[:, i] = gp[i][A.indices[:, i]]
    pts.setflags(write=False)
    return UnisolventNodes(A=A, gp=gp, points=pts)


def default_nodes(A: MultiIndexSet, kind: int = 2, leja: bool = True) -> UnisolventNodes:
    """Unisolvent nodes from (Leja-ordered) Chebyshev generating nodes.

    Each dimension gets the Chebyshev family of the set's degree ``n`` when
    known, otherwise of the per-dimension maximal exponent.
    """
    if A.n is not None:
        deg = [max(int(A.n), int(d)) for d in A.max_degrees]
    else:
        deg = [int(d) for d in A.max_degrees]
    return generate_unisolvent(A, GeneratingNodes.chebyshev(A.m, deg, kind=kind, leja=leja))

