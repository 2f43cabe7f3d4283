"""Multivariate Newton interpolation on unisolvent grids.

The Newton coefficients are computed by the A1/A2 splitting along the last
coordinate: the values on the hyperplane ``x_m = p_{0,m}`` are interpolated
in one dimension less, while the remaining values are replaced by divided
differences in ``x_m`` and treated recursively. Unrolled, this amounts to
in-place 1D divided-difference sweeps along every fiber of ``A`` in
direction ``m``, then ``m-1``, ..., then ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multiindex import MultiIndexSet
from .nodes import GeneratingNodes, UnisolventNodes

_EVAL_CHUNK = 1 << 22  # max entries of a (points x terms) work array


class InterpolationError(ValueError):
    """Raised for inconsistent interpolation input."""


@dataclass(frozen=True, eq=False)
class NewtonPolynomial:
    """``Q(x) = sum_alpha c_alpha N_alpha(x)`` with coefficients in lex order of ``A``."""

    A: MultiIndexSet
    gp: GeneratingNodes
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.shape[0] != len(self.A):
            raise InterpolationError(f"expected {len(self.A)} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1 and x.shape[0] == self.A.m:
            return eval_newton(self, x)
        return eval_newton_batch(self, x)


def _check_gp(A: MultiIndexSet, gp: GeneratingNodes):
    if gp.m != A.m:
        raise InterpolationError(f"generating nodes have dimension {gp.m}, set has {A.m}")
    if len(A) and np.any(gp.lengths() < A.max_degrees + 1):
        raise InterpolationError("generating nodes do not cover the multi-index set")


def newton_basis_eval(alpha, gp: GeneratingNodes, x) -> float:
    """``N_alpha(x) = prod_i prod_{j < alpha_i} (x_i - p_{j,i})``."""
    alpha = [int(a) for a in alpha]
    x = np.asarray(x, dtype=float).ravel()
    if len(alpha) != x.size or gp.m != x.size:
        raise InterpolationError("dimension mismatch between multi-index, nodes and point")
    out = 1.0
    for i, a in enumerate(alpha):
        if a > gp[i].size:
            raise InterpolationError(f"generating nodes too short in dimension {i + 1}")
        for j in range(a):
            out *= x[i] - gp[i][j]
    return out


def _fiber_sweeps(A: MultiIndexSet):
    """Per dimension: sort permutation grouping fibers, and per-step index pairs."""

    def build():
        idx = A.indices
        plans = []
        for i in range(A.m):
            others = [idx[:, j] for j in range(A.m) if j != i]
            # lexsort: last key is primary; alpha_i is the least significant key
            perm = np.lexsort([idx[:, i]] + others[::-1]) if others else np.arange(len(A))
            a = idx[perm, i]
            steps = []
            for k in range(int(a.max(initial=0))):
                sel = np.nonzero(a > k)[0]
                # fibers are contiguous and start at alpha_i = 0
                partner = sel - (a[sel] - k)
                steps.append((k, sel, partner, a[sel]))
            plans.append((perm, steps))
        return plans

    return A.cached("fiber_sweeps", build)


def _divided_differences(A: MultiIndexSet, gp: GeneratingNodes, F: np.ndarray,
                         stats: dict | None = None) -> np.ndarray:
    c = np.array(F, dtype=float, copy=True)
    ops = 0
    for i in reversed(range(A.m)):
        perm, steps = _fiber_sweeps(A)[i]
        x = gp[i]
        g = c[perm]
        for k, sel, partner, a in steps:
            den = x[a] - x[k]
            if c.ndim == 2:
                den = den[:, None]
            g[sel] = (g[sel] - g[partner]) / den
            ops += sel.size
        c[perm] = g
    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + ops
    return c


def divided_differences(A: MultiIndexSet, nodes: UnisolventNodes, F,
                        stats: dict | None = None) -> NewtonPolynomial:
    """Newton coefficients of the interpolant of ``F`` on ``nodes``.

    Parameters
    ----------
    A : MultiIndexSet
        Complete multi-index set.
    nodes : UnisolventNodes
        Nodes generated from ``A`` and some generating nodes.
    F : array_like of shape (|A|,)
        Function values aligned with ``A``.
    stats : dict, optional
        If given, ``stats["ops"]`` is incremented by the number of
        subtract-divide updates performed.
    """
    F = np.asarray(F, dtype=float)
    if F.shape[0] != len(A):
        raise InterpolationError(f"expected {len(A)} values, got {F.shape[0]}")
    if nodes.A is not A and nodes.A != A:
        raise InterpolationError("nodes were generated for a different multi-index set")
    _check_gp(A, nodes.gp)
    return NewtonPolynomial(A, nodes.gp, _divided_differences(A, nodes.gp, F, stats))


def _horner_plan(A: MultiIndexSet):
    """Fiber layout of ``A`` and of its projections onto coordinates i..m."""

    def build():
        levels = []
        cur = A.indices
        for i in range(A.m):
            first = cur[:, 0]
            starts = np.nonzero(first == 0)[0]
            lens = np.diff(np.append(starts, len(cur)))
            steps = [np.nonzero(lens > k)[0] for k in range(int(lens.max(initial=0)))]
            levels.append((starts, steps))
            cur = cur[starts, 1:]
        return levels

    return A.cached("horner_plan", build)


def _horner(A: MultiIndexSet, gp: GeneratingNodes, coeffs: np.ndarray, xs: np.ndarray):
    npts = xs.shape[0]
    vals = coeffs[None, :]
    for i, (starts, steps) in enumerate(_horner_plan(A)):
        acc = np.zeros((npts, starts.size))
        xi = xs[:, i:i + 1]
        for k in range(len(steps) - 1, -1, -1):
            sel = steps[k]
            acc[:, sel] = vals[:, starts[sel] + k] + (xi - gp[i][k]) * acc[:, sel]
        vals = acc
    return vals[:, 0]


def eval_newton(Q: NewtonPolynomial, x) -> float:
    """Evaluate a Newton-form polynomial at one point (multivariate Horner scheme)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (Q.A.m,):
        raise InterpolationError(f"expected a point of dimension {Q.A.m}, got shape {x.shape}")
    return float(_horner(Q.A, Q.gp, Q.coefficients, x[None, :])[0])


def eval_newton_batch(Q: NewtonPolynomial, xs) -> np.ndarray:
    """Evaluate at every row of ``xs``; identical to repeated :func:`eval_newton`."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0)
    if xs.ndim == 1:
        xs = xs.reshape(-1, 1) if Q.A.m == 1 else xs.reshape(1, -1)
    if xs.shape[1] != Q.A.m:
        raise InterpolationError(f"points have dimension {xs.shape[1]}, expected {Q.A.m}")
    if len(Q.A) == 0:
        return np.zeros(xs.shape[0])
    chunk = max(1, _EVAL_CHUNK // max(1, len(Q.A)))
    out = np.empty(xs.shape[0])
    for s in range(0, xs.shape[0], chunk):
        out[s:s + chunk] = _horner(Q.A, Q.gp, Q.coefficients, xs[s:s + chunk])
    return out


def newton_basis_matrix(A: MultiIndexSet, gp: GeneratingNodes, xs) -> np.ndarray:
    """Matrix ``(N_beta(x_k))`` with rows for points and columns in lex order of ``A``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != A.m:
        raise InterpolationError(f"points have dimension {xs.shape[1]}, expected {A.m}")
    _check_gp(A, gp)
    out = np.ones((xs.shape[0], len(A)))
    for i in range(A.m):
        deg = int(A.max_degrees[i])
        table = np.ones((xs.shape[0], deg + 1))
        for j in range(deg):
            table[:, j + 1] = table[:, j] * (xs[:, i] - gp[i][j])
        out *= table[:, A.indices[:, i]]
    return out


def interpolate(nodes: UnisolventNodes, f) -> NewtonPolynomial:
    """Interpolate a callable taking an ``(N, m)`` array on ``nodes``."""
    F = np.asarray(f(nodes.points), dtype=float).reshape(len(nodes))
    return divided_differences(nodes.A, nodes, F)
