"""Complete (downward closed) multi-index sets.

Multi-indices are ordered lexicographically starting from the *last*
coordinate, i.e. ``alpha_m`` is the most significant entry and ``alpha_1``
the least significant one::

    (5, 3, 1) < (1, 0, 3) < (1, 1, 3)

Every set is stored as an ``(N, m)`` integer array sorted in that order,
paired with a hash map for O(1) membership probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

DEFAULT_CARDINALITY_CAP = 10**8
_GENERIC_P_RTOL = 1e-12


class MultiIndexError(ValueError):
    """Raised for malformed multi-indices or multi-index sets."""


def normalize_p(p) -> float:
    """Return ``p`` as a float, accepting ``"inf"`` and numeric input."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise MultiIndexError(f"degree norm p must satisfy p >= 1 or p = inf, got {p}")
    return p


def lex_key(alpha: Sequence[int]) -> tuple:
    """Sort key realizing the lexicographic order (last coordinate first)."""
    return tuple(reversed(tuple(int(a) for a in alpha)))


def lex_compare(a: Sequence[int], b: Sequence[int]) -> int:
    """Compare two multi-indices.

    Returns -1, 0 or 1 when ``a`` is less than, equal to, or greater than
    ``b``. Coordinates are compared from the last one to the first one.
    """
    if len(a) != len(b):
        raise MultiIndexError(f"dimension mismatch: {len(a)} vs {len(b)}")
    ka, kb = lex_key(a), lex_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def _lex_sort(indices: np.ndarray) -> np.ndarray:
    if len(indices) == 0:
        return indices
    # np.lexsort uses the last key as primary key -> pass columns in natural order
    order = np.lexsort(indices.T)
    return indices[order]


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """A lexicographically sorted set of multi-indices in ``N^m``.

    Parameters
    ----------
    m : int
        Spatial dimension.
    indices : ndarray of shape (N, m)
        Multi-indices, strictly ascending in lexicographic order.
    n, p : optional
        Degree and degree norm when the set equals ``A_{m,n,p}``.
    """

    m: int
    indices: np.ndarray
    n: int | None = None
    p: float | None = None
    _lookup: dict = field(default=None, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64).reshape(-1, self.m)
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        if self._lookup is None:
            object.__setattr__(
                self, "_lookup", {tuple(row): i for i, row in enumerate(idx.tolist())}
            )

    @classmethod
    def from_indices(cls, indices: Iterable[Sequence[int]], m: int | None = None,
                     n: int | None = None, p=None) -> "MultiIndexSet":
        """Build a set from arbitrary (unsorted, possibly repeated) indices."""
        arr = np.array([list(a) for a in indices], dtype=np.int64)
        if arr.size == 0:
            if m is None:
                raise MultiIndexError("cannot infer the dimension of an empty set")
            arr = arr.reshape(0, m)
        if arr.ndim != 2 or (m is not None and arr.shape[1] != m):
            raise MultiIndexError("inconsistent multi-index lengths")
        if m is None:
            m = arr.shape[1]
        if m < 1:
            raise MultiIndexError("dimension must be >= 1")
        if np.any(arr < 0):
            raise MultiIndexError("multi-index entries must be non-negative")
        arr = np.unique(arr, axis=0)
        return cls(m=m, indices=_lex_sort(arr), n=n,
                   p=None if p is None else normalize_p(p))

    def __len__(self) -> int:
        return self.indices.shape[0]

    def __iter__(self):
        return (tuple(row) for row in self.indices.tolist())

    def __contains__(self, alpha) -> bool:
        return tuple(int(a) for a in alpha) in self._lookup

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiIndexSet):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((self.m, self.indices.tobytes()))

    def __repr__(self) -> str:
        spec = "" if self.n is None else f", n={self.n}, p={self.p}"
        return f"MultiIndexSet(m={self.m}, size={len(self)}{spec})"

    def position(self, alpha) -> int:
        """Index of ``alpha`` in the lexicographic enumeration."""
        try:
            return self._lookup[tuple(int(a) for a in alpha)]
        except KeyError:
            raise KeyError(f"{tuple(alpha)} not in set") from None

    def positions(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`position`; missing entries map to -1."""
        get = self._lookup.get
        return np.fromiter((get(tuple(r), -1) for r in np.asarray(indices).tolist()),
                           dtype=np.int64, count=len(indices))

    @property
    def max_degrees(self) -> np.ndarray:
        """Per-dimension maximal exponent ``n_i = max alpha_i``."""
        if len(self) == 0:
            return np.zeros(self.m, dtype=np.int64)
        return self.indices.max(axis=0)

    def cached(self, key, builder):
        """Memoize derived data (fiber plans etc.) on this immutable set."""
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = builder()
            return value


def _vmax(used, n: int, p: float) -> np.ndarray:
    """Largest admissible next exponent given the accumulated cost."""
    if p == 1:
        return n - used
    if p == 2:
        rem = n * n - used
        out = np.floor(np.sqrt(np.maximum(rem, 0).astype(float))).astype(np.int64)
        # correct possible floating error of sqrt on large integers
        out -= (out * out > rem)
        out += ((out + 1) * (out + 1) <= rem)
        return np.where(rem < 0, -1, out)
    if math.isinf(p):
        return np.full(np.shape(used), n, dtype=np.int64)
    budget = float(n) ** p * (1.0 + _GENERIC_P_RTOL)
    rem = budget - used
    out = np.floor(np.maximum(rem, 0.0) ** (1.0 / p)).astype(np.int64)
    out -= (out.astype(float) ** p > rem)
    out += ((out + 1).astype(float) ** p <= rem)
    return np.where(rem < 0, -1, out)


def _cost(v: np.ndarray, p: float):
    if p == 1:
        return v
    if p == 2:
        return v * v
    if math.isinf(p):
        return np.zeros_like(v)
    return v.astype(float) ** p


def build_complete_set(m: int, n: int, p=1, cap: int = DEFAULT_CARDINALITY_CAP) -> MultiIndexSet:
    """Return ``A_{m,n,p} = {alpha in N^m : ||alpha||_p <= n}`` in lex order.

    Membership is decided with integer arithmetic for ``p`` in {1, 2, inf};
    other real ``p`` use floating point with relative tolerance 1e-12.

    Raises
    ------
    MultiIndexError
        If ``p < 1``, ``m < 1``, ``n < 0`` or the cardinality exceeds ``cap``.
    """
    p = normalize_p(p)
    if int(m) != m or m < 1:
        raise MultiIndexError(f"dimension must be a positive integer, got {m}")
    if int(n) != n or n < 0:
        raise MultiIndexError(f"degree must be a non-negative integer, got {n}")
    m, n = int(m), int(n)
    if p in (1.0, 2.0):
        p = int(p)
    if math.isinf(p) and (n + 1) ** m > cap:
        raise MultiIndexError(f"|A| = {(n + 1) ** m} exceeds the cardinality cap {cap}")

    # grow from the most significant coordinate (x_m) down to x_1; appending a
    # new least-significant coordinate keeps the rows lex-sorted
    rows = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=float if p not in (1, 2) and not math.isinf(p) else np.int64)
    for _ in range(m):
        vmax = _vmax(used, n, p)
        counts = vmax + 1
        total = int(counts.sum())
        if total > cap:
            raise MultiIndexError(f"|A| exceeds the cardinality cap {cap}")
        parent = np.repeat(np.arange(len(rows)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        v = np.arange(total, dtype=np.int64) - starts
        rows = np.column_stack([v, rows[parent]])
        used = used[parent] + _cost(v, p)
    return MultiIndexSet(m=m, indices=rows, n=n, p=float(p))


def is_complete(A: MultiIndexSet) -> bool:
    """True iff ``A`` is downward closed (checking the direct predecessors suffices)."""
    idx = A.indices
    for i in range(A.m):
        sel = idx[:, i] > 0
        pred = idx[sel].copy()
        pred[:, i] -= 1
        if np.any(A.positions(pred) < 0):
            return False
    return True


class Boundaries(NamedTuple):
    inner: np.ndarray
    outer: np.ndarray
    closure: MultiIndexSet


def boundaries(A: MultiIndexSet) -> Boundaries:
    """Discrete inner/outer boundaries and the closure of a complete set.

    ``inner`` holds the indices of ``A`` having at least one forward
    neighbour ``alpha + e_i`` outside of ``A``; ``outer`` collects those
    neighbours. With this convention ``closure = A | outer`` is complete.
    Both boundary arrays are lex-sorted.
    """
    idx = A.indices
    m = A.m
    outside = np.zeros((len(A), m), dtype=bool)
    for i in range(m):
        nxt = idx.copy()
        nxt[:, i] += 1
        outside[:, i] = A.positions(nxt) < 0
    inner = idx[outside.any(axis=1)]
    cand = [idx[outside[:, i]] + np.eye(m, dtype=np.int64)[i] for i in range(m)]
    outer = np.unique(np.concatenate(cand), axis=0) if cand else np.zeros((0, m), np.int64)
    outer = _lex_sort(outer.reshape(-1, m))
    closure = MultiIndexSet.from_indices(np.concatenate([idx, outer]), m=m)
    return Boundaries(inner=_lex_sort(inner), outer=outer, closure=closure)


class Split(NamedTuple):
    lower: MultiIndexSet
    upper: MultiIndexSet
    shifted: bool


def split_on_last(A: MultiIndexSet) -> Split:
    """Split ``A`` into ``{alpha_m = 0}`` and the rest, the latter shifted by ``-e_m``."""
    if len(A) == 0:
        raise MultiIndexError("cannot split an empty set")
    last = A.indices[:, -1]
    lower = A.indices[last == 0]
    upper = A.indices[last > 0].copy()
    upper[:, -1] -= 1
    # lex order is preserved by both operations
    return Split(MultiIndexSet(m=A.m, indices=lower),
                 MultiIndexSet(m=A.m, indices=upper), True)


def to_json_dict(A: MultiIndexSet) -> dict:
    p = A.p
    return {
        "m": A.m,
        "n": A.n,
        "p": None if p is None else ("inf" if math.isinf(p) else p),
        "indices": A.indices.tolist(),
    }


def from_json_dict(d: dict) -> MultiIndexSet:
    A = MultiIndexSet.from_indices(d["indices"], m=int(d["m"]), n=d.get("n"), p=d.get("p"))
    if [list(r) for r in A.indices.tolist()] != [list(r) for r in d["indices"]]:
        raise MultiIndexError("indices in JSON are not strictly lex-ascending")
    return A
