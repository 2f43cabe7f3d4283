"""CSV and JSON formats shared by the command-line tools.

All JSON documents carry ``"schema": 1``. Floats are written with ``repr``
precision so that reading back is exact and repeated runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .approx import BenchmarkRecord
from .multiindex import from_json_dict, to_json_dict
from .newton import NewtonPolynomial
from .nodes import GeneratingNodes

SCHEMA = 1
BENCH_COLUMNS = ("m", "n", "p", "cardinality", "max_error", "seconds", "seed")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    return obj


def dumps(doc: dict) -> str:
    """Deterministic JSON text with a trailing newline."""
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def write_json(path, doc: dict) -> None:
    text = dumps(doc)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def read_points_csv(path, m: int | None = None, with_values: bool = False):
    """Rows of ``x_1, ..., x_m[, value]``; lines starting with ``#`` and a non-numeric header are skipped.

    Returns ``points`` or ``(points, values)``. With ``with_values`` the last
    column is taken as the value column when ``m`` is not given.
    """
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError:
                if rows:
                    raise
                continue  # header
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{path}: no numeric rows")
    if m is None:
        m = arr.shape[1] - 1 if with_values else arr.shape[1]
    if arr.shape[1] < m:
        raise ValueError(f"{path}: expected at least {m} columns, got {arr.shape[1]}")
    if with_values:
        if arr.shape[1] < m + 1:
            raise ValueError(f"{path}: missing value column")
        return arr[:, :m], arr[:, m]
    return arr[:, :m]


def points_csv_text(points, values=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    pts = np.atleast_2d(points)
    for k, row in enumerate(pts):
        vals = [repr(float(v)) for v in row]
        if values is not None:
            vals.append(repr(float(values[k])))
        w.writerow(vals)
    return buf.getvalue()


def coefficient_bundle(Q: NewtonPolynomial, **extra) -> dict:
    """Self-contained Newton coefficient document (set, generating nodes and coefficients)."""
    return {"schema": SCHEMA, "kind": "newton", "multiindex": to_json_dict(Q.A),
            "gp": Q.gp.to_json_dict(), "coefficients": Q.coefficients.tolist(), **extra}


def polynomial_from_bundle(doc: dict) -> NewtonPolynomial:
    if doc.get("schema") != SCHEMA or doc.get("kind") != "newton":
        raise ValueError("not a schema-1 Newton coefficient bundle")
    A = from_json_dict(doc["multiindex"])
    gp = GeneratingNodes.from_json_dict(doc["gp"])
    return NewtonPolynomial(A, gp, np.asarray(doc["coefficients"], dtype=float))


def records_csv_text(records: Iterable[BenchmarkRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in records:
        p = "inf" if math.isinf(r.p) else repr(float(r.p))
        w.writerow([r.m, r.n, p, r.node_count, repr(r.max_error), f"{r.seconds:.6f}", r.seed])
    return buf.getvalue()


def read_records_csv(path) -> list[BenchmarkRecord]:
    """Benchmark CSV in the column layout of :data:`BENCH_COLUMNS` (extra columns ignored)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(BENCH_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            out.append(BenchmarkRecord(m=int(row["m"]), n=int(row["n"]), p=float(row["p"]),
                                       node_count=int(row["cardinality"]),
                                       max_error=float(row["max_error"]),
                                       seconds=float(row["seconds"]), seed=int(row["seed"])))
    return out


def comparison_table(ours: Sequence[BenchmarkRecord], others: dict) -> list[dict]:
    """Rows keyed by degree with one error column per method."""
    by_n: dict[int, dict] = {}
    for r in ours:
        by_n.setdefault(r.n, {"n": r.n})["mvinterp"] = r.max_error
    for name, recs in others.items():
        for r in recs:
            by_n.setdefault(r.n, {"n": r.n})[name] = r.max_error
    return [by_n[n] for n in sorted(by_n)]


def coefficients_csv_text(Q: NewtonPolynomial) -> str:
    """Columns ``a_1..a_m, c`` in lex order of the set."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"a{i + 1}" for i in range(Q.A.m)] + ["c"])
    for alpha, c in zip(Q.A.indices.tolist(), Q.coefficients):
        w.writerow(alpha + [repr(float(c))])
    return buf.getvalue()


def matrix_csv_text(M) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in np.atleast_2d(M):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
