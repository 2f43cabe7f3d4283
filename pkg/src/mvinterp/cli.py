"""``mvinterp`` command-line entry point.

Every subcommand loads its inputs, calls library functions and writes the
result; no numerics live here. Exit codes: 0 success, 1 domain error (JSON
description on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import approx, dual, fileio, scattered, transform
from .multiindex import DEFAULT_CARDINALITY_CAP, MultiIndexError, build_complete_set
from .newton import InterpolationError, divided_differences, eval_newton_batch
from .nodes import GeneratingNodes, NodeError, generate_unisolvent

DEGREE_CAPS = {1: 200, 2: 60, 3: 30}
DEFAULT_DEGREE_CAP = 16

DOMAIN_ERRORS = (MultiIndexError, NodeError, InterpolationError, ArithmeticError,
                 ValueError, KeyError, OSError)


class UsageError(Exception):
    pass


def _p(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p: {text!r}") from None
    if not v >= 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or inf")
    return v


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _global_parser(with_defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags without defaults so they do not mask the top-level values
    def d(v):
        return v if with_defaults else argparse.SUPPRESS

    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
    g.add_argument("--tol-rank", type=float, default=d(dual.DEFAULT_RANK_TOL),
                   help="relative pivot threshold for numerical rank")
    g.add_argument("--cap-cardinality", type=int, default=d(DEFAULT_CARDINALITY_CAP),
                   help="refuse multi-index sets larger than this")
    return g


def _set_args(sp, need_n=True):
    sp.add_argument("-m", type=int, required=True, help="dimension")
    if need_n:
        sp.add_argument("-n", type=int, required=True, help="degree")
    sp.add_argument("-p", type=_p, default=2.0, help="l_p degree (number or inf)")
    sp.add_argument("--gp", default="cheb2",
                    help="generating nodes: cheb1, cheb2 or a JSON file (default cheb2)")
    sp.add_argument("--no-leja", dest="leja", action="store_false", help="keep natural node order")
    sp.add_argument("--scale", type=_floats, default=None,
                    help="per-dimension factors applied to Chebyshev generating nodes")


def build_parser() -> argparse.ArgumentParser:
    glob = _global_parser(False)
    ap = argparse.ArgumentParser(prog="mvinterp", parents=[_global_parser(True)],
                                 description="Multivariate polynomial interpolation on complete multi-index sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("interpolate", parents=[glob], help="Newton coefficients of an interpolant")
    _set_args(sp)
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--fn", help="runge10, runge1 or a coefficient bundle file")
    src.add_argument("--values", help="CSV with one value per node, in node order")
    sp.add_argument("--format", choices=("json", "csv"), default="json",
                    help="self-contained JSON bundle or CSV of (alpha, c) rows")
    sp.add_argument("--nodes-out", default=None, help="also write the interpolation nodes as CSV")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("eval", parents=[glob], help="evaluate a coefficient bundle")
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--points", required=True, help="CSV of points")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("transform", parents=[glob], help="NL, LN, CN, NC matrices")
    _set_args(sp)
    sp.add_argument("--cache-dir", default=None)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("scattered", parents=[glob], help="interpolate on given unisolvent nodes")
    _set_args(sp)
    sp.add_argument("--nodes", required=True, help="CSV x_1..x_m[,value]")
    sp.add_argument("--fn", default=None, help="function to sample instead of a value column")
    sp.add_argument("--lebesgue", type=float, default=None,
                    help="reference Lebesgue constant (default: 1D formula to the power m)")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("dual", parents=[glob], help="maximal unisolvent subset and kernel")
    _set_args(sp)
    sp.add_argument("--nodes", required=True, help="CSV x_1..x_m")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("variety", parents=[glob], help="regression on sampled varieties")
    _set_args(sp)
    sp.add_argument("--samples", default=None, help="CSV x_1..x_m[,value]")
    sp.add_argument("--torus", type=_floats, default=None, metavar="R,r",
                    help="sample floor(1.5|A|) torus points instead of reading a file (m = 3)")
    sp.add_argument("--fn", default=None, help="function to fit (overrides a value column)")
    sp.add_argument("--canonical", action="store_true", help="also report kernel in monomial coefficients")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("lebesgue", parents=[glob], help="sampled Lebesgue constant")
    _set_args(sp)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("bench-runge", parents=[glob], help="convergence benchmark and rate fit")
    _set_args(sp, need_n=False)
    sp.add_argument("--fn", default="runge10")
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=None, help="default: desk-scale cap for m")
    sp.add_argument("--test-points", type=int, default=100)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--compare", action="append", default=[], metavar="NAME=CSV",
                    help="external benchmark CSV with the same columns")
    sp.add_argument("--summary", default=None, help="write the JSON summary here (default stdout)")
    sp.add_argument("-o", "--output", default=None, help="benchmark CSV")

    sp = sub.add_parser("bench-perturb", parents=[glob], help="perturbed-grid study")
    sp.add_argument("-m", type=int, default=2)
    sp.add_argument("-p", type=_p, default=2.0)
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--amplitudes", type=_floats, default=[0.0, 0.05, 0.1, 0.25, 0.5, 1.0])
    sp.add_argument("--fn", default="runge1")
    sp.add_argument("--test-points", type=int, default=200)
    sp.add_argument("-o", "--output", default="-")
    return ap


# ------------------------------------------------------------------ helpers

def _generating_nodes(args, m: int, n: int) -> GeneratingNodes:
    if args.gp in ("cheb1", "cheb2"):
        return GeneratingNodes.chebyshev(m, n, kind=int(args.gp[-1]), leja=args.leja, scale=args.scale)
    path = Path(args.gp)
    if not path.exists():
        raise UsageError(f"--gp must be cheb1, cheb2 or an existing file, got {args.gp!r}")
    gp = GeneratingNodes.from_json_dict(fileio.read_json(path))
    if gp.m != m:
        raise NodeError(f"generating-node file has dimension {gp.m}, expected {m}")
    return gp


def _nodes(args):
    A = build_complete_set(args.m, args.n, args.p, cap=args.cap_cardinality)
    return A, generate_unisolvent(A, _generating_nodes(args, args.m, args.n))


def _function(name: str):
    if name in approx.FUNCTIONS:
        return approx.FUNCTIONS[name]
    path = Path(name)
    if path.exists():
        return fileio.polynomial_from_bundle(fileio.read_json(path))
    raise UsageError(f"unknown function {name!r}; use {', '.join(approx.FUNCTIONS)} or a coefficient file")


def _write_text(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _p_json(p: float):
    return "inf" if math.isinf(p) else p


# ------------------------------------------------------------------ commands

def cmd_interpolate(args):
    A, nodes = _nodes(args)
    if args.fn:
        F = np.asarray(_function(args.fn)(nodes.points), dtype=float)
    else:
        F = fileio.read_points_csv(args.values, m=1)[:, 0]
    Q = divided_differences(A, nodes, F)
    if args.nodes_out:
        _write_text(args.nodes_out, fileio.points_csv_text(nodes.points))
    if args.format == "csv":
        _write_text(args.output, fileio.coefficients_csv_text(Q))
    else:
        fileio.write_json(args.output, fileio.coefficient_bundle(Q))


def cmd_eval(args):
    Q = fileio.polynomial_from_bundle(fileio.read_json(args.coeffs))
    xs = fileio.read_points_csv(args.points, m=Q.A.m)
    fileio.write_json(args.output, {"schema": fileio.SCHEMA, "values": eval_newton_batch(Q, xs)})


def cmd_transform(args):
    A, nodes = _nodes(args)
    if args.cache_dir:
        T = transform.cached_transform(nodes, args.cache_dir)
    else:
        T = transform.TransformSet.build(nodes)
    fileio.write_json(args.output, T.to_json_dict())


def cmd_scattered(args):
    A, ref = _nodes(args)
    if args.fn:
        X = fileio.read_points_csv(args.nodes, m=args.m)
        F = _function(args.fn)(X)
    else:
        X, F = fileio.read_points_csv(args.nodes, m=args.m, with_values=True)
    sys_ = scattered.build_scattered(A, ref, X)
    c_lag = scattered.interpolate_scattered(sys_, F)
    lam = args.lebesgue
    if lam is None:
        lam = max(1.0, approx.lebesgue_1d_formula(max(args.n, 1)) ** args.m)
    doc = {"schema": fileio.SCHEMA, "lagrange_coefficients": c_lag,
           "s_inf": sys_.s_inf, "s_n": scattered.scattered_error_factor(sys_, lam),
           "lebesgue_reference": lam, "condition_estimate": sys_.condition_estimate,
           "newton": fileio.coefficient_bundle(sys_.polynomial(c_lag))}
    fileio.write_json(args.output, doc)


def _dual_doc(dec: dual.DualDecomposition) -> dict:
    return {"k": dec.k, "kernel_dimension": dec.kernel_dimension,
            "p0_rows": dec.p0_rows, "basis_columns": dec.basis_columns,
            "kernel_basis": dec.kernel_basis.T, "interp_basis": dec.interp_basis.T}


def cmd_dual(args):
    A, ref = _nodes(args)
    X = fileio.read_points_csv(args.nodes, m=args.m)
    dec = dual.dual_decompose(A, ref, X, rank_tol=args.tol_rank)
    fileio.write_json(args.output, {"schema": fileio.SCHEMA, **_dual_doc(dec)})


def cmd_variety(args):
    A = build_complete_set(args.m, args.n, args.p, cap=args.cap_cardinality)
    F = None
    if args.torus is not None:
        if args.m != 3 or len(args.torus) != 2:
            raise UsageError("--torus needs -m 3 and two radii R,r")
        R, r = args.torus
        if args.scale is None:
            args.scale = [1.0, 1.0, r]
        X = dual.sample_torus(int(1.5 * len(A)), np.random.default_rng(args.seed), R, r)
    elif args.samples:
        X = fileio.read_points_csv(args.samples)
        if X.shape[1] == args.m + 1:
            X, F = X[:, :args.m], X[:, args.m]
        elif X.shape[1] != args.m:
            raise InterpolationError(f"samples need {args.m} or {args.m + 1} columns")
    else:
        raise UsageError("variety needs --samples or --torus")
    ref = generate_unisolvent(A, _generating_nodes(args, args.m, args.n))
    if args.fn:
        F = _function(args.fn)(X)
    doc = {"schema": fileio.SCHEMA, "samples": int(X.shape[0]), "cardinality": len(A)}
    if F is None:
        dec = dual.dual_decompose(A, ref, X, rank_tol=args.tol_rank)
    else:
        fit = dual.variety_fit(A, ref, X, F, rank_tol=args.tol_rank)
        dec = fit.decomposition
        doc.update(lagrange_coefficients=fit.coefficients, residual_max=fit.residual_max,
                   residual_rms=fit.residual_rms)
    doc.update(_dual_doc(dec))
    if args.canonical and dec.kernel_dimension:
        T = transform.TransformSet.build(ref)
        doc["kernel_canonical"] = (T.NC @ T.LN @ dec.kernel_basis).T
    fileio.write_json(args.output, doc)


def cmd_lebesgue(args):
    A, nodes = _nodes(args)
    est = approx.lebesgue_estimate(A, nodes, seed=args.seed)
    doc = {"schema": fileio.SCHEMA, "value": est.value, "sample_count": est.sample_count,
           "scheme": est.scheme, "sampled": est.sampled}
    if args.n >= 1:
        doc["formula_1d"] = approx.lebesgue_1d_formula(args.n)
    fileio.write_json(args.output, doc)


def cmd_bench_runge(args):
    n_max = args.n_max if args.n_max is not None else DEGREE_CAPS.get(args.m, DEFAULT_DEGREE_CAP)
    if n_max < args.n_min:
        raise UsageError("--n-max must be at least --n-min")
    recs = approx.run_convergence(_function(args.fn), args.m, args.p, range(args.n_min, n_max + 1),
                                  gp_family=args.gp, test_points=args.test_points, seed=args.seed,
                                  leja=args.leja, workers=args.workers, cap=args.cap_cardinality)
    if args.output:
        _write_text(args.output, fileio.records_csv_text(recs))
    summary = {"schema": fileio.SCHEMA, "m": args.m, "p": _p_json(args.p), "seed": args.seed,
               "function": args.fn, "degrees": [args.n_min, n_max]}
    try:
        fit = approx.fit_rate(recs)
        summary["fit"] = {"rho": fit.rho, "c": fit.c, "n_lo": fit.n_lo, "n_hi": fit.n_hi,
                          "r_squared": fit.r_squared, "floored": list(fit.floored),
                          "converging": fit.converging}
    except ValueError as e:
        summary["fit"] = None
        summary["fit_error"] = str(e)
    if args.compare:
        others = {}
        for item in args.compare:
            name, sep, path = item.partition("=")
            if not sep:
                raise UsageError(f"--compare expects NAME=CSV, got {item!r}")
            others[name] = fileio.read_records_csv(path)
        summary["comparison"] = fileio.comparison_table(recs, others)
    if args.summary:
        fileio.write_json(args.summary, summary)
    elif args.output or args.compare:
        fileio.write_json("-", summary)
    else:
        _write_text("-", fileio.records_csv_text(recs))


def cmd_bench_perturb(args):
    if args.n_max < args.n_min:
        raise UsageError("--n-max must be at least --n-min")
    st = approx.run_perturbation_study(args.m, args.p, range(args.n_min, args.n_max + 1),
                                       args.amplitudes, seed=args.seed, f=_function(args.fn),
                                       test_points=args.test_points)
    lines = ["n,nu,ap,est,baseline,s_inf,s_n,retries,failed"]
    for r in st.records:
        lines.append(",".join([str(r.n), repr(r.nu), repr(r.ap), repr(r.est), repr(r.baseline),
                               repr(r.s_inf), repr(r.s_n), str(r.retries), str(int(r.failed))]))
    _write_text(args.output, "\n".join(lines) + "\n")


COMMANDS = {
    "interpolate": cmd_interpolate, "eval": cmd_eval, "transform": cmd_transform,
    "scattered": cmd_scattered, "dual": cmd_dual, "variety": cmd_variety,
    "lebesgue": cmd_lebesgue, "bench-runge": cmd_bench_runge, "bench-perturb": cmd_bench_perturb,
}


def _error_json(exc: BaseException) -> str:
    doc = {"error": type(exc).__name__, "message": str(exc)}
    cond = getattr(exc, "condition_estimate", None)
    if cond is not None:
        doc["condition_estimate"] = cond if math.isfinite(cond) else "inf"
    return json.dumps(doc, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"mvinterp: error: {e}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as e:
        print(_error_json(e), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
