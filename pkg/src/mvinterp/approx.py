"""Error diagnostics and convergence benchmarks."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .multiindex import (DEFAULT_CARDINALITY_CAP, MultiIndexSet, boundaries, build_complete_set,
                         normalize_p)
from .newton import divided_differences, eval_newton_batch, newton_basis_matrix
from .nodes import GeneratingNodes, UnisolventNodes, generate_unisolvent
from .scattered import (NotUnisolventError, build_scattered, interpolate_scattered,
                        perturb_grid, scattered_error_factor)
from .transform import build_LN

EULER_GAMMA = 0.5772156649015329
ERROR_FLOOR = 1e-16
_MAX_GRID_POINTS = 100_000
_CHUNK_ENTRIES = 1 << 22


def runge10(x) -> np.ndarray:
    """``1 / (1 + 10 |x|^2)``"""
    x = np.atleast_2d(x)
    return 1.0 / (1.0 + 10.0 * (x ** 2).sum(axis=1))


def runge1(x) -> np.ndarray:
    """``1 / (1 + |x|^2)``"""
    x = np.atleast_2d(x)
    return 1.0 / (1.0 + (x ** 2).sum(axis=1))


FUNCTIONS: dict[str, Callable] = {"runge10": runge10, "runge1": runge1}


def make_generating_nodes(m: int, n: int, family: str = "cheb2", leja: bool = True) -> GeneratingNodes:
    kinds = {"cheb1": 1, "cheb2": 2}
    if family not in kinds:
        raise ValueError(f"unknown node family {family!r}; expected one of {sorted(kinds)}")
    return GeneratingNodes.chebyshev(m, n, kind=kinds[family], leja=leja)


# ---------------------------------------------------------------- Lebesgue

@dataclass(frozen=True)
class LebesgueEstimate:
    """Sampled maximum of the Lebesgue function; a lower bound of the true constant."""

    value: float
    sample_count: int
    scheme: str
    sampled: bool = True


def lebesgue_1d_formula(n: int) -> float:
    """``(2/pi) (log n + gamma + log(8/pi))``, the asymptotic Chebyshev Lebesgue constant."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return 2.0 / math.pi * (math.log(n) + EULER_GAMMA + math.log(8.0 / math.pi))


def default_lebesgue_samples(nodes: UnisolventNodes, grid: int = 33, random_count: int = 10_000,
                             seed: int = 0) -> tuple[np.ndarray, str]:
    """Nodes, a tensor grid and, for m >= 3, ``random_count`` uniform points.

    The grid has at least ``grid`` points per axis and is refined while the
    total stays within :data:`_MAX_GRID_POINTS`; if ``grid**m`` alone exceeds
    that budget the per-axis count is reduced instead.
    """
    m = nodes.m
    g = max(grid, int(math.floor(_MAX_GRID_POINTS ** (1.0 / m) + 1e-9)))
    while g > 2 and g ** m > _MAX_GRID_POINTS:
        g -= 1
    axes = np.meshgrid(*[np.linspace(-1.0, 1.0, g)] * m, indexing="ij")
    parts = [nodes.points, np.column_stack([a.ravel() for a in axes])]
    scheme = f"nodes+grid{g}^{m}"
    if m >= 3 and random_count > 0:
        parts.append(np.random.default_rng(seed).uniform(-1.0, 1.0, (random_count, m)))
        scheme += f"+random{random_count}"
    return np.vstack(parts), scheme


def lebesgue_function(nodes: UnisolventNodes, xs, LN: np.ndarray | None = None) -> np.ndarray:
    """``sum_alpha |L_alpha(x)|`` at each row of ``xs``."""
    A = nodes.A
    if LN is None:
        LN = build_LN(A, nodes)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    out = np.empty(xs.shape[0])
    chunk = max(1, _CHUNK_ENTRIES // max(1, len(A)))
    for s in range(0, xs.shape[0], chunk):
        B = newton_basis_matrix(A, nodes.gp, xs[s:s + chunk]) @ LN
        out[s:s + chunk] = np.abs(B).sum(axis=1)
    return out


def lebesgue_estimate(A: MultiIndexSet, nodes: UnisolventNodes, samples=None,
                      seed: int = 0) -> LebesgueEstimate:
    """Sampled Lebesgue constant of ``nodes``.

    Without explicit ``samples`` the layout of :func:`default_lebesgue_samples`
    is used. Explicit samples are taken as given.
    """
    if samples is None:
        samples, scheme = default_lebesgue_samples(nodes, seed=seed)
    else:
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        scheme = "custom"
    if samples.size == 0:
        raise ValueError("no sample points")
    vals = lebesgue_function(nodes, samples)
    return LebesgueEstimate(value=float(vals.max()), sample_count=int(samples.shape[0]), scheme=scheme)


# ---------------------------------------------------------------- remainder bound

def newton_sup_1d(x: np.ndarray, degree: int, samples: int = 4096) -> float:
    """Sampled ``sup_{t in [-1, 1]} prod_{j < degree} |t - x_j|``."""
    t = np.linspace(-1.0, 1.0, samples)
    w = np.ones_like(t)
    for j in range(degree):
        w *= np.abs(t - x[j])
    return float(w.max())


def error_bound(A: MultiIndexSet, gp: GeneratingNodes, derivative_bounds: Mapping,
                samples: int = 4096, inflation: float = 1e-3) -> float:
    """Upper bound ``sum_beta M_beta / beta! * sup |N_beta|`` over the outer boundary.

    Parameters
    ----------
    derivative_bounds : mapping
        ``beta -> M_beta`` with ``M_beta >= sup |d^beta f|``, keyed by tuples.
        Every index of the outer boundary must be present.
    """
    outer = boundaries(A).outer
    total = 0.0
    sups: dict[tuple[int, int], float] = {}
    for beta in outer:
        key = tuple(int(b) for b in beta)
        if key not in derivative_bounds:
            raise KeyError(f"missing derivative bound for {key}")
        M = float(derivative_bounds[key])
        if M == 0.0:
            continue
        s = 1.0
        for i, b in enumerate(key):
            if b > gp[i].size:
                raise ValueError(f"generating nodes too short in dimension {i + 1}")
            if (i, b) not in sups:
                sups[(i, b)] = newton_sup_1d(gp[i], b, samples) * (1.0 + inflation) if b else 1.0
            s *= sups[(i, b)]
        total += M / math.prod(math.factorial(b) for b in key) * s
    return total


# ---------------------------------------------------------------- benchmarks

@dataclass(frozen=True)
class BenchmarkRecord:
    m: int
    n: int
    p: float
    node_count: int
    max_error: float
    seconds: float
    seed: int


def _convergence_job(args) -> BenchmarkRecord:
    f, m, n, p, family, leja, test_points, seed, cap = args
    t0 = time.perf_counter()
    A = build_complete_set(m, n, p, cap=cap)
    nodes = generate_unisolvent(A, make_generating_nodes(m, n, family, leja))
    Q = divided_differences(A, nodes, np.asarray(f(nodes.points), dtype=float))
    rng = np.random.default_rng([seed, n])
    xs = rng.uniform(-1.0, 1.0, (test_points, m))
    err = float(np.abs(eval_newton_batch(Q, xs) - f(xs)).max())
    return BenchmarkRecord(m=m, n=n, p=A.p, node_count=len(A), max_error=err,
                           seconds=time.perf_counter() - t0, seed=seed)


def run_convergence(f: Callable, m: int, p, degrees: Sequence[int], gp_family: str = "cheb2",
                    test_points: int = 100, seed: int = 0, leja: bool = True, workers: int = 1,
                    cap: int = DEFAULT_CARDINALITY_CAP) -> list[BenchmarkRecord]:
    """Interpolate ``f`` for every degree and measure the max error at random test points.

    Test points are uniform on ``[-1, 1]^m``, drawn afresh for each degree
    from a generator seeded with ``(seed, n)``. With ``workers > 1`` degrees
    run in separate processes (``f`` must then be picklable).
    """
    jobs = [(f, m, int(n), p, gp_family, leja, test_points, seed, cap) for n in degrees]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            recs = list(ex.map(_convergence_job, jobs))
    else:
        recs = [_convergence_job(j) for j in jobs]
    return sorted(recs, key=lambda r: r.n)


@dataclass(frozen=True)
class RateFit:
    """Fit of ``error ~ c * rho**(-n)``."""

    rho: float
    c: float
    n_lo: int
    n_hi: int
    r_squared: float
    floored: tuple = ()
    converging: bool = True


def fit_rate(records: Sequence[BenchmarkRecord], n_lo: int | None = None,
             n_hi: int | None = None) -> RateFit:
    """Least-squares fit of ``log(err) = log(c) - n log(rho)`` over ``n_lo <= n <= n_hi``.

    Errors below ``1e-16`` are floored and listed in ``floored``; they enter
    the fit but not the R-squared value.
    """
    recs = [r for r in records
            if (n_lo is None or r.n >= n_lo) and (n_hi is None or r.n <= n_hi)
            and np.isfinite(r.max_error)]
    n = np.array([r.n for r in recs], dtype=float)
    e = np.array([r.max_error for r in recs], dtype=float)
    flagged = e < ERROR_FLOOR
    if (~flagged).sum() < 4:
        raise ValueError("need at least 4 records with errors above the floor")
    y = np.log(np.maximum(e, ERROR_FLOOR))
    X = np.column_stack([np.ones_like(n), -n])
    (logc, logrho), *_ = np.linalg.lstsq(X, y, rcond=None)
    yk, fk = y[~flagged], (X @ np.array([logc, logrho]))[~flagged]
    ss_res = float(((yk - fk) ** 2).sum())
    ss_tot = float(((yk - yk.mean()) ** 2).sum())
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    rho = float(np.exp(logrho))
    return RateFit(rho=rho, c=float(np.exp(logc)), n_lo=int(n.min()), n_hi=int(n.max()),
                   r_squared=float(min(1.0, max(0.0, r2))),
                   floored=tuple(int(v) for v in n[flagged]),
                   converging=bool(rho > 1.0 + 1e-9))


@dataclass(frozen=True)
class PerturbationRecord:
    n: int
    nu: float
    ap: float
    est: float
    baseline: float
    s_inf: float
    s_n: float
    retries: int
    failed: bool = False


@dataclass(frozen=True)
class PerturbationStudy:
    m: int
    p: float
    seed: int
    records: tuple = field(default_factory=tuple)

    def curve(self, nu: float, key: str = "ap") -> tuple[np.ndarray, np.ndarray]:
        rows = sorted((r for r in self.records if r.nu == nu), key=lambda r: r.n)
        return (np.array([r.n for r in rows]), np.array([getattr(r, key) for r in rows]))


def run_perturbation_study(m: int, p, degrees: Sequence[int], amplitudes: Sequence[float],
                           seed: int = 0, f: Callable = runge1, test_points: int = 200,
                           max_retries: int = 5, lebesgue: str = "formula") -> PerturbationStudy:
    """Scattered interpolation on randomly perturbed Chebyshev grids.

    For each degree the unperturbed grid gives the baseline error; each
    amplitude ``nu`` perturbs the grid, interpolates through the
    change-of-nodes matrix and records the measured error ``ap`` and the
    estimate ``est = s_n * baseline``. ``lebesgue="formula"`` takes the
    reference Lebesgue constant as the 1D formula to the power ``m``,
    ``"sampled"`` uses :func:`lebesgue_estimate`.
    """
    if any(not 0.0 <= nu <= 1.0 for nu in amplitudes):
        raise ValueError("amplitudes must lie in [0, 1]")
    out = []
    for n in degrees:
        n = int(n)
        A = build_complete_set(m, n, p)
        ref = generate_unisolvent(A, make_generating_nodes(m, n))
        xs = np.random.default_rng([seed, n]).uniform(-1.0, 1.0, (test_points, m))
        fx = f(xs)
        base = divided_differences(A, ref, f(ref.points))
        baseline = float(np.abs(eval_newton_batch(base, xs) - fx).max())
        if lebesgue == "formula":
            lam = max(1.0, lebesgue_1d_formula(max(n, 1)) ** m)
        elif lebesgue == "sampled":
            lam = lebesgue_estimate(A, ref, seed=seed).value
        else:
            raise ValueError(f"unknown Lebesgue mode {lebesgue!r}")
        for j, nu in enumerate(amplitudes):
            rng = np.random.default_rng([seed, n, j + 1])
            for attempt in range(max_retries + 1):
                try:
                    sys_ = build_scattered(A, ref, perturb_grid(ref.points, nu, rng))
                    break
                except NotUnisolventError:
                    sys_ = None
            if sys_ is None:
                out.append(PerturbationRecord(n, float(nu), np.nan, np.nan, baseline,
                                              np.nan, np.nan, attempt, failed=True))
                continue
            Q = sys_.polynomial(interpolate_scattered(sys_, f(sys_.given_nodes)))
            ap = float(np.abs(eval_newton_batch(Q, xs) - fx).max())
            s_n = scattered_error_factor(sys_, lam)
            out.append(PerturbationRecord(n, float(nu), ap, s_n * baseline, baseline,
                                          sys_.s_inf, s_n, attempt))
    return PerturbationStudy(m=m, p=normalize_p(p), seed=seed,
                             records=tuple(out))
