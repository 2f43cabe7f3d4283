"""End-to-end acceptance checks.

Each test prints one ``CRITERION k: PASS|FAIL`` line (also collected in the
terminal summary) and then asserts the same condition, so a failing
criterion shows up both as a red test and in the summary table.
"""
import math
import time
from math import comb

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from mvinterp.approx import (BenchmarkRecord, error_bound, fit_rate, lebesgue_1d_formula,
                             lebesgue_estimate, run_convergence, run_perturbation_study,
                             runge1, runge10)
from mvinterp.dual import (dual_decompose, sample_torus, torus_canonical_coefficients,
                           torus_reference, variety_fit)
from mvinterp.multiindex import boundaries, build_complete_set
from mvinterp.newton import NewtonPolynomial, divided_differences, eval_newton_batch
from mvinterp.nodes import (GeneratingNodes, chebyshev_first, chebyshev_second, default_nodes,
                            generate_unisolvent, leja_order)
from mvinterp.transform import TransformSet


def report(label, ok, detail):
    line = f"CRITERION {label}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def running_min(e):
    return np.minimum.accumulate(np.asarray(e, dtype=float))


def test_criterion_1_cardinality():
    t0 = time.perf_counter()
    bad = []
    for m in range(1, 6):
        for n in range(0, 11):
            if len(build_complete_set(m, n, 1)) != comb(m + n, n):
                bad.append((m, n, 1))
            if len(build_complete_set(m, n, np.inf)) != (n + 1) ** m:
                bad.append((m, n, "inf"))
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 1.0, f"mismatches={bad} time={dt:.2f}s (limit 1s)")


def test_criterion_2_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for m in (1, 2, 3):
        for p in (1, 2, np.inf):
            for n in range(0, 7):
                A = build_complete_set(m, n, p)
                P = default_nodes(A)
                rng = np.random.default_rng([m, n, 0 if p == np.inf else int(p)])
                for _ in range(20):
                    Q = NewtonPolynomial(A, P.gp, rng.standard_normal(len(A)))
                    R = divided_differences(A, P, eval_newton_batch(Q, P.points))
                    xs = rng.uniform(-1, 1, (100, m))
                    q = eval_newton_batch(Q, xs)
                    rel = np.abs(eval_newton_batch(R, xs) - q).max() / max(np.abs(q).max(), 1e-300)
                    worst = max(worst, rel)
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-9 and dt < 30, f"max relative error={worst:.2e} (tol 1e-9) time={dt:.1f}s")


def classic_table(x, y):
    n = len(x)
    T = np.zeros((n, n))
    T[:, 0] = y
    for j in range(1, n):
        for i in range(n - j):
            T[i, j] = (T[i + 1, j - 1] - T[i, j - 1]) / (x[i + j] - x[i])
    return T[0]


def test_criterion_3_one_dimensional_oracle():
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 31))
        x = leja_order(chebyshev_second(n) if seed % 2 == 0 else chebyshev_first(n))
        y = rng.standard_normal(n + 1)
        A = build_complete_set(1, n, 1)
        P = generate_unisolvent(A, GeneratingNodes((x,)))
        got = divided_differences(A, P, y).coefficients
        ref = classic_table(x, y)
        worst = max(worst, np.abs(got - ref).max() / max(1.0, np.abs(ref).max()))
    report(3, worst <= 1e-13, f"max deviation={worst:.2e} (tol 1e-13, 20 Leja-Chebyshev instances)")


def test_criterion_4_matrix_identities():
    t0 = time.perf_counter()
    worst = {"NL.LN": (0.0, None), "CN.NC": (0.0, None), "V-NL.CN": (0.0, None)}
    triangular = True
    for m in (1, 2, 3):
        for p in (1, 2, np.inf):
            n = 1
            while True:
                A = build_complete_set(m, n, p)
                if len(A) > 500:
                    break
                T = TransformSet.build(default_nodes(A))
                triangular &= bool(np.all(np.triu(T.NL, 1) == 0) and np.all(np.tril(T.CN, -1) == 0))
                eye = np.eye(len(A))
                res = {"NL.LN": np.abs(T.NL @ T.LN - eye).max(),
                       "CN.NC": np.abs(T.CN @ T.NC - eye).max(),
                       "V-NL.CN": np.abs(T.V - T.NL @ T.CN).max()}
                for k, v in res.items():
                    if v > worst[k][0]:
                        worst[k] = (v, (m, n, p))
                n += 1 if m > 1 else 9
    dt = time.perf_counter() - t0
    ok = (triangular and worst["NL.LN"][0] <= 1e-10 and worst["CN.NC"][0] <= 1e-10
          and worst["V-NL.CN"][0] <= 1e-8 and dt < 60)
    detail = " ".join(f"{k}={v:.1e}@(m,n,p)={w}" for k, (v, w) in worst.items())
    report(4, ok, f"{detail} triangular={triangular} time={dt:.1f}s")


@pytest.fixture(scope="module")
def runge_runs():
    t0 = time.perf_counter()
    r2 = run_convergence(runge10, 2, 2, range(2, 61))
    r1 = run_convergence(runge10, 2, 1, range(2, 41))
    return r2, r1, time.perf_counter() - t0


def test_criterion_5_runge_rate(runge_runs):
    r2, r1, dt = runge_runs
    f2 = fit_rate(r2, 2, 40)
    f1 = fit_rate(r1, 2, 40)
    predicted = 1.0 / math.sqrt(2.0)
    exponent = math.log(f1.rho) / math.log(f2.rho)
    ok_rho = 1.25 <= f2.rho <= 1.45
    ok_r2 = f2.r_squared >= 0.97
    ok_ratio = f1.rho < f2.rho and abs(exponent / predicted - 1.0) <= 0.2
    report(5, ok_rho and ok_r2 and ok_ratio and dt < 300,
           f"rho(p=2)={f2.rho:.4f} [1.25,1.45] {'ok' if ok_rho else 'out'}; "
           f"R2={f2.r_squared:.4f} (need 0.97) {'ok' if ok_r2 else 'low'}; "
           f"rho(p=1)={f1.rho:.4f} log-ratio={exponent:.3f} vs {predicted:.3f} "
           f"{'ok' if ok_ratio else 'off'}; time={dt:.1f}s")


def test_criterion_6_precision_plateau(runge_runs):
    r2, _, _ = runge_runs
    err = {r.n: r.max_error for r in r2}
    e60 = err[60]
    env = running_min([err[n] for n in range(2, 61)])
    envelope_decreasing = bool(env[-1] < env[0] and np.all(np.diff(env) <= 0))
    primary = e60 <= 1e-10
    fallback = e60 <= 1e-8 and envelope_decreasing
    report(6, primary or fallback,
           f"error(n=60)={e60:.2e}; primary 1e-10 {'met' if primary else 'missed'}; "
           f"fallback 1e-8 with decreasing envelope {'met' if fallback else 'missed'}")


def test_criterion_7_perturbation():
    t0 = time.perf_counter()
    amplitudes = [0.0, 0.05, 0.25, 0.5, 1.0]
    study = run_perturbation_study(2, 2, range(2, 21), amplitudes, seed=0, f=runge1)
    dt = time.perf_counter() - t0
    parts, ok = [], True
    for nu in amplitudes:
        _, ap = study.curve(nu, "ap")
        _, est = study.curve(nu, "est")
        dominated = bool(np.all(est >= ap))
        recs = [r for r in study.records if r.nu == nu]
        fit = fit_rate([BenchmarkRecord(2, r.n, 2.0, 0, r.ap, 0.0, 0) for r in recs])
        decreasing = fit.rho >= 1.1 and ap[-1] <= ap[0] / 100
        if nu < 1.0:
            ok &= dominated and decreasing
        parts.append(f"nu={nu}: rho={fit.rho:.3f} AP(2)={ap[0]:.1e} AP(20)={ap[-1]:.1e} "
                     f"EST>=AP={dominated}")
    report(7, ok and dt < 180, "; ".join(parts) + f"; time={dt:.1f}s")


def test_criterion_8_torus():
    t0 = time.perf_counter()
    A = build_complete_set(3, 4, 2)
    ref = torus_reference(A)
    T = TransformSet.build(ref)
    qt = torus_canonical_coefficients(A)
    qt = qt / qt[np.argmax(np.abs(qt))]
    dims, devs = [], []
    for seed in range(10):
        X = sample_torus(int(1.5 * len(A)), np.random.default_rng(seed))
        dec = dual_decompose(A, ref, X)
        dims.append(dec.kernel_dimension)
        if dec.kernel_dimension == 1:
            c = T.NC @ T.LN @ dec.kernel_basis[:, 0]
            devs.append(np.abs(c / c[np.argmax(np.abs(c))] - qt).max())
    degrees = range(2, 9)
    E = np.zeros((10, len(degrees)))
    for i, n in enumerate(degrees):
        An = build_complete_set(3, n, 2)
        refn = torus_reference(An)
        for seed in range(10):
            rng = np.random.default_rng([seed, n])
            X = sample_torus(int(1.5 * len(An)), rng)
            fit = variety_fit(An, refn, X, runge10(X))
            Y = sample_torus(200, rng)
            E[seed, i] = np.abs(fit(Y) - runge10(Y)).max()
    med = np.median(E, axis=0)
    band = all(med[i] <= 2.0 * med[:i].min() for i in range(1, len(med))) and med[-1] < med[0]
    dt = time.perf_counter() - t0
    dev = max(devs) if devs else np.inf
    ok = all(d == 1 for d in dims) and dev <= 1e-6 and band and dt < 120
    report(8, ok, f"kernel dims={sorted(set(dims))} max coeff deviation={dev:.1e} "
                  f"median held-out error n=2..8: {' '.join(f'{v:.1e}' for v in med)} "
                  f"2x band={'ok' if band else 'broken'} time={dt:.1f}s")


def test_criterion_9_lebesgue():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (10, 50):
        A = build_complete_set(1, n, 1)
        lam = lebesgue_estimate(A, default_nodes(A)).value
        good = abs(lam - lebesgue_1d_formula(n)) <= 0.05
        ok &= good
        parts.append(f"1D n={n}: {lam:.4f} vs {lebesgue_1d_formula(n):.4f} {'ok' if good else 'off'}")
    for n in (4, 8, 16):
        A = build_complete_set(2, n, 2)
        lam = lebesgue_estimate(A, default_nodes(A)).value
        bound = (lebesgue_1d_formula(n) + 0.1) ** 2
        good = lam <= bound
        ok &= good
        parts.append(f"2D n={n}: {lam:.2f} vs bound {bound:.2f} {'ok' if good else 'exceeds'}")
    dt = time.perf_counter() - t0
    report(9, ok and dt < 60, "; ".join(parts) + f"; time={dt:.1f}s")


def test_criterion_10_error_bound():
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for m in (1, 2):
        def f(x, m=m):
            return np.exp(np.atleast_2d(x).sum(axis=1) / m)
        for n in range(2, 9):
            A = build_complete_set(m, n, 2)
            P = default_nodes(A)
            Q = divided_differences(A, P, f(P.points))
            xs = np.vstack([np.random.default_rng([m, n]).uniform(-1, 1, (4000, m)),
                            np.array(np.meshgrid(*[np.linspace(-1, 1, 41)] * m)).reshape(m, -1).T])
            err = np.abs(eval_newton_batch(Q, xs) - f(xs)).max()
            bounds = {tuple(int(b) for b in beta): math.e * m ** (-int(sum(beta)))
                      for beta in boundaries(A).outer}
            bnd = error_bound(A, P.gp, bounds)
            ok &= err <= bnd
            worst = max(worst, err / bnd)
    dt = time.perf_counter() - t0
    report(10, ok and dt < 30, f"max error/bound ratio={worst:.3f} (must be <= 1) time={dt:.1f}s")


def test_smoke_four_dimensions():
    recs = run_convergence(runge10, 4, 2, range(1, 13))
    e = [r.max_error for r in recs]
    ok = all(b < a for a, b in zip(e, e[1:]))
    report("smoke m=4", ok, "errors n=1..12: " + " ".join(f"{v:.1e}" for v in e)
           + f" |A_4,12,2|={recs[-1].node_count}")
