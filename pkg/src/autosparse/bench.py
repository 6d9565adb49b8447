"""Benchmark harness: per-element insertion across storage formats, and
fused vs materialised trace(A^T B).

Every insertion variant is a compiled driver that builds its structure
one element at a time through the same insertion cores the library
itself uses, so the measured differences are data-structure costs, not
interpreter overhead.  Runs whose outputs disagree with the batch-built
reference never report a timing.

Defaults are desk scale (size 2000); set BENCH_PAPER_SCALE=1 for the
original 10000x10000 setup.  Timings are median wall-clock over
`reps` runs after one untimed warm-up.
"""

from __future__ import annotations

import argparse
import csv as _csv
import os
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import csc as csc_mod
from . import expr as expr_mod
from . import ops
from .csc import Dims, _insert_realloc, _locate, _shift_insert
from .errors import CorrectnessError, ResourceLimitError
from .rbt import _append_at, _inorder_decode, _insert

DESK_SIZE = 2000
PAPER_SIZE = 10000
DESK_DENSITIES = (0.0001, 0.001, 0.01)
PAPER_DENSITIES = (0.0001, 0.001, 0.01, 0.1)

INSERT_VARIANTS = ("csc_naive", "csc_oversized", "coo", "rbt", "hybrid")
ORDERS = ("random", "quasi_ordered")
TRACE_MODES = ("fused", "materialized")

# hard cap on schedule length; beyond this the naive variant's quadratic
# copying would also be hopeless
MAX_ELEMENTS = 50_000_000


@dataclass
class BenchResult:
    experiment: str
    variant: str
    n_rows: int
    n_cols: int
    density: float
    seconds: float
    seed: int
    repetitions: int


def make_schedule(size: int, density: float, order: str, seed: int):
    """Distinct random positions (rows, cols, values) for the insertion
    experiment; quasi_ordered sorts them into strictly increasing
    column-major order."""
    if order not in ORDERS:
        raise ValueError("unknown order %r" % order)
    dims = Dims(size, size)
    k = int(np.floor(density * dims.n_cells + 0.5))
    if k > MAX_ELEMENTS:
        raise ResourceLimitError(
            "schedule of %d elements exceeds the %d element limit" % (k, MAX_ELEMENTS)
        )
    rng = np.random.default_rng(seed)
    pos = ops._sample_positions(dims.n_cells, k, rng)
    if order == "random":
        rng.shuffle(pos)
    else:
        pos = np.sort(pos)
    vals = rng.random(k)
    while True:
        zero = vals == 0.0
        if not zero.any():
            break
        vals[zero] = rng.random(int(zero.sum()))
    rows = pos % size
    cols = pos // size
    return rows.astype(np.int64), cols.astype(np.int64), vals


@njit(cache=True)
def _drive_csc_naive(rows, cols, vals, n_cols):
    values = np.empty(0, np.float64)
    rowidx = np.empty(0, np.int64)
    offsets = np.zeros(n_cols + 1, np.int64)
    for i in range(rows.shape[0]):
        r = rows[i]
        c = cols[i]
        pos = _locate(rowidx, offsets[c], offsets[c + 1], r)
        if pos < offsets[c + 1] and rowidx[pos] == r:
            values[pos] = vals[i]
        else:
            values, rowidx, offsets = _insert_realloc(
                values, rowidx, offsets, pos, c, r, vals[i]
            )
    return values, rowidx, offsets


@njit(cache=True)
def _drive_csc_oversized(rows, cols, vals, n_cols):
    cap = 16
    values = np.empty(cap, np.float64)
    rowidx = np.empty(cap, np.int64)
    offsets = np.zeros(n_cols + 1, np.int64)
    nnz = 0
    for i in range(rows.shape[0]):
        r = rows[i]
        c = cols[i]
        pos = _locate(rowidx, offsets[c], offsets[c + 1], r)
        if pos < offsets[c + 1] and rowidx[pos] == r:
            values[pos] = vals[i]
            continue
        if nnz == cap:
            cap *= 2
            new_values = np.empty(cap, np.float64)
            new_rowidx = np.empty(cap, np.int64)
            new_values[:nnz] = values[:nnz]
            new_rowidx[:nnz] = rowidx[:nnz]
            values = new_values
            rowidx = new_rowidx
        _shift_insert(values, rowidx, offsets, nnz, pos, c, r, vals[i])
        nnz += 1
    return values[:nnz], rowidx[:nnz], offsets


@njit(cache=True)
def _drive_coo(rows, cols, vals, n_rows):
    # canonical-sorted COO with oversized parallel arrays; the linear
    # key array mirrors (col, row) purely to position insertions
    cap = 16
    out_rows = np.empty(cap, np.int64)
    out_cols = np.empty(cap, np.int64)
    out_vals = np.empty(cap, np.float64)
    keys = np.empty(cap, np.int64)
    nnz = 0
    for i in range(rows.shape[0]):
        key = cols[i] * n_rows + rows[i]
        pos = _locate(keys, 0, nnz, key)
        if pos < nnz and keys[pos] == key:
            out_vals[pos] = vals[i]
            continue
        if nnz == cap:
            cap *= 2
            nk = np.empty(cap, np.int64)
            nr = np.empty(cap, np.int64)
            nc = np.empty(cap, np.int64)
            nv = np.empty(cap, np.float64)
            nk[:nnz] = keys[:nnz]
            nr[:nnz] = out_rows[:nnz]
            nc[:nnz] = out_cols[:nnz]
            nv[:nnz] = out_vals[:nnz]
            keys, out_rows, out_cols, out_vals = nk, nr, nc, nv
        for j in range(nnz, pos, -1):
            keys[j] = keys[j - 1]
            out_rows[j] = out_rows[j - 1]
            out_cols[j] = out_cols[j - 1]
            out_vals[j] = out_vals[j - 1]
        keys[pos] = key
        out_rows[pos] = rows[i]
        out_cols[pos] = cols[i]
        out_vals[pos] = vals[i]
        nnz += 1
    return out_rows[:nnz], out_cols[:nnz], out_vals[:nnz]


@njit(cache=True)
def _drive_rbt(rows, cols, vals, n_rows):
    """Per-element tree build; indices past the current maximum take
    the rightmost-append fast path.  Returns the arena plus how many
    inserts used the fast path."""
    n = rows.shape[0]
    cap = max(n, 1)
    keys = np.empty(cap, np.int64)
    tvals = np.empty(cap, np.float64)
    left = np.empty(cap, np.int64)
    right = np.empty(cap, np.int64)
    parent = np.empty(cap, np.int64)
    color = np.empty(cap, np.uint8)
    root = np.int64(-1)
    rightmost = np.int64(-1)
    max_key = np.int64(-1)
    top = 0
    n_append = 0
    for i in range(n):
        key = cols[i] * n_rows + rows[i]
        if key > max_key:
            root = _append_at(
                keys, tvals, left, right, parent, color, root, rightmost, key, vals[i], top
            )
            rightmost = top
            max_key = key
            top += 1
            n_append += 1
        else:
            root, inserted = _insert(
                keys, tvals, left, right, parent, color, root, key, vals[i], top
            )
            if inserted:
                top += 1
    return keys, tvals, left, right, root, top, n_append


def _rbt_arena_to_csc(arena, size: int) -> csc_mod.CscData:
    keys, tvals, left, right, root, count, _n_append = arena
    out_rows = np.empty(count, np.int64)
    out_vals = np.empty(count, np.float64)
    col_counts = np.zeros(max(size, 1), np.int64)
    if count:
        _inorder_decode(keys, tvals, left, right, root, size, out_rows, out_vals, col_counts)
    offsets = np.zeros(size + 1, np.int64)
    np.cumsum(col_counts[:size], out=offsets[1:])
    return csc_mod.CscData(Dims(size, size), out_vals, out_rows, offsets)


def _build_once(variant: str, rows, cols, vals, size: int):
    """Run one full build; returns (canonical CscData, build seconds,
    convert seconds or 0, fast-path append count)."""
    if variant == "csc_naive":
        t0 = time.perf_counter()
        values, rowidx, offsets = _drive_csc_naive(rows, cols, vals, size)
        dt = time.perf_counter() - t0
        return csc_mod.CscData(Dims(size, size), values, rowidx, offsets), dt, 0.0, 0
    if variant == "csc_oversized":
        t0 = time.perf_counter()
        values, rowidx, offsets = _drive_csc_oversized(rows, cols, vals, size)
        dt = time.perf_counter() - t0
        return (
            csc_mod.CscData(Dims(size, size), values.copy(), rowidx.copy(), offsets),
            dt,
            0.0,
            0,
        )
    if variant == "coo":
        t0 = time.perf_counter()
        out_rows, out_cols, out_vals = _drive_coo(rows, cols, vals, size)
        dt = time.perf_counter() - t0
        data = csc_mod.canonicalize(Dims(size, size), out_rows, out_cols, out_vals)
        return data, dt, 0.0, 0
    if variant == "rbt":
        t0 = time.perf_counter()
        arena = _drive_rbt(rows, cols, vals, size)
        dt = time.perf_counter() - t0
        return _rbt_arena_to_csc(arena, size), dt, 0.0, arena[6]
    if variant == "hybrid":
        t0 = time.perf_counter()
        arena = _drive_rbt(rows, cols, vals, size)
        t1 = time.perf_counter()
        data = _rbt_arena_to_csc(arena, size)
        t2 = time.perf_counter()
        return data, t2 - t0, t2 - t1, arena[6]
    raise ValueError("unknown insert variant %r" % variant)


def bench_insert(
    size: int,
    density: float,
    variant: str,
    order: str = "random",
    seed: int = 0,
    reps: int = 3,
) -> list:
    """Time per-element construction to the target density.

    Returns one result row, plus a separate `hybrid_convert` row for
    the hybrid variant's tree-to-CSC conversion share.
    """
    if variant not in INSERT_VARIANTS:
        raise ValueError("unknown insert variant %r" % variant)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rows, cols, vals = make_schedule(size, density, order, seed)
    expected = csc_mod.canonicalize(
        Dims(size, size), rows, cols, vals, csc_mod.DUP_LAST
    )

    built, _dt, _cv, _ap = _build_once(variant, rows, cols, vals, size)  # warm-up
    if not built.same_elements(expected):
        raise CorrectnessError(
            "%s build diverged from the batch-built reference" % variant
        )
    build_times = []
    convert_times = []
    for _ in range(reps):
        built, dt, cv, _ap = _build_once(variant, rows, cols, vals, size)
        if not built.same_elements(expected):
            raise CorrectnessError(
                "%s build diverged from the batch-built reference" % variant
            )
        build_times.append(dt)
        convert_times.append(cv)

    results = [
        BenchResult("insert", variant, size, size, density,
                    statistics.median(build_times), seed, reps)
    ]
    if variant == "hybrid":
        results.append(
            BenchResult("insert", "hybrid_convert", size, size, density,
                        statistics.median(convert_times), seed, reps)
        )
    return results


def bench_trace(
    size: int,
    density: float,
    mode: str,
    seed: int = 0,
    reps: int = 3,
) -> BenchResult:
    """Time trace(A^T B) with (fused) or without (materialized) the
    expression rewrite; the two answers must agree or the run aborts."""
    if mode not in TRACE_MODES:
        raise ValueError("unknown trace mode %r" % mode)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    a = ops.sprandu(size, size, density, seed)
    b = ops.sprandu(size, size, density, seed + 1)
    e = expr_mod.Trace(expr_mod.Mul(expr_mod.Transpose(expr_mod.lift(a)), expr_mod.lift(b)))

    fused_val, fused_tmp = expr_mod.evaluate_counting(e, optimize=True)
    naive_val = expr_mod.evaluate(e, optimize=False)
    scale = max(1.0, abs(naive_val))
    if abs(fused_val - naive_val) > 1e-10 * scale:
        raise CorrectnessError(
            "fused %.17g and materialized %.17g traces disagree" % (fused_val, naive_val)
        )
    if fused_tmp != 0:
        raise CorrectnessError("fused trace materialised %d matrices" % fused_tmp)

    optimize = mode == "fused"
    expr_mod.evaluate(e, optimize=optimize)  # warm-up
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        expr_mod.evaluate(e, optimize=optimize)
        times.append(time.perf_counter() - t0)
    return BenchResult("trace", mode, size, size, density,
                       statistics.median(times), seed, reps)


def emit(results, sink, fmt: str = "csv") -> None:
    """Write results as CSV/TSV with a fixed 8-column header."""
    if fmt not in ("csv", "tsv"):
        raise ValueError("fmt must be 'csv' or 'tsv'")
    writer = _csv.writer(sink, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
    writer.writerow(
        ["experiment", "variant", "n_rows", "n_cols", "density", "seconds", "seed", "reps"]
    )
    for r in results:
        writer.writerow(
            [r.experiment, r.variant, r.n_rows, r.n_cols, repr(r.density),
             repr(r.seconds), r.seed, r.repetitions]
        )


def parse_results(text: str, fmt: str = "csv"):
    """Parse emit() output back into BenchResult records."""
    reader = _csv.reader(text.splitlines(), delimiter="," if fmt == "csv" else "\t")
    rows = list(reader)
    out = []
    for row in rows[1:]:
        out.append(
            BenchResult(row[0], row[1], int(row[2]), int(row[3]), float(row[4]),
                        float(row[5]), int(row[6]), int(row[7]))
        )
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _paper_scale() -> bool:
    return os.environ.get("BENCH_PAPER_SCALE", "") == "1"


def main(argv=None) -> int:
    default_size = PAPER_SIZE if _paper_scale() else DESK_SIZE
    default_densities = PAPER_DENSITIES if _paper_scale() else DESK_DENSITIES

    parser = _Parser(prog="autosparse-bench",
                     description="insertion and fused-trace benchmarks")
    sub = parser.add_subparsers(dest="experiment", required=True)

    p_ins = sub.add_parser("insert", help="per-element construction timing")
    p_ins.add_argument("--size", type=int, default=default_size)
    p_ins.add_argument("--density", type=float, action="append",
                       help="repeatable; defaults to the standard sweep")
    p_ins.add_argument("--variant", choices=INSERT_VARIANTS + ("all",), default="all")
    p_ins.add_argument("--order", choices=ORDERS, default="random")
    p_ins.add_argument("--seed", type=int, default=0)
    p_ins.add_argument("--reps", type=int, default=3)
    p_ins.add_argument("--out", default=None, help="output file (default stdout)")
    p_ins.add_argument("--fmt", choices=("csv", "tsv"), default="csv")

    p_tr = sub.add_parser("trace", help="fused vs materialized trace(A^T B)")
    p_tr.add_argument("--size", type=int, default=default_size)
    p_tr.add_argument("--density", type=float, action="append")
    p_tr.add_argument("--mode", choices=TRACE_MODES + ("both",), default="both")
    p_tr.add_argument("--seed", type=int, default=0)
    p_tr.add_argument("--reps", type=int, default=3)
    p_tr.add_argument("--out", default=None)
    p_tr.add_argument("--fmt", choices=("csv", "tsv"), default="csv")

    args = parser.parse_args(argv)
    densities = args.density if args.density else list(default_densities)

    results = []
    try:
        if args.experiment == "insert":
            variants = INSERT_VARIANTS if args.variant == "all" else (args.variant,)
            for density in densities:
                for variant in variants:
                    results.extend(
                        bench_insert(args.size, density, variant, args.order,
                                     args.seed, args.reps)
                    )
        else:
            modes = TRACE_MODES if args.mode == "both" else (args.mode,)
            for density in densities:
                for mode in modes:
                    results.append(
                        bench_trace(args.size, density, mode, args.seed, args.reps)
                    )
    except CorrectnessError as exc:
        print("correctness failure: %s" % exc, file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print("resource limit: %s" % exc, file=sys.stderr)
        return 1

    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            emit(results, fh, args.fmt)
    else:
        emit(results, sys.stdout, args.fmt)
    return 0


if __name__ == "__main__":
    sys.exit(main())
