"""Persistence and display: Matrix Market coordinate files and a
plain-text renderer.

Only the ``matrix coordinate real general`` flavour is accepted;
indices are 1-based on disk, entries are written in column-major order
with 17 significant digits so values round-trip bit for bit.
"""

from __future__ import annotations

import io as _stdio
from pathlib import Path

import numpy as np

from . import csc as csc_mod
from .csc import CscData, Dims
from .errors import CorruptionError, DuplicateEntryError, MatrixMarketError
from .hybrid import SpMat

_HEADER_TOKENS = ("%%MatrixMarket", "matrix", "coordinate", "real", "general")
HEADER_LINE = " ".join(_HEADER_TOKENS)


def _as_csc(m) -> CscData:
    if isinstance(m, SpMat):
        return m.csc()
    if isinstance(m, CscData):
        return m
    raise TypeError("expected SpMat or CscData, got %r" % type(m).__name__)


def save_mm(m, sink) -> None:
    """Write Matrix Market coordinate/real/general to a path or a text
    file object."""
    data = _as_csc(m)
    if hasattr(sink, "write"):
        _write_mm(data, sink)
    else:
        with open(sink, "w", encoding="ascii") as fh:
            _write_mm(data, fh)


def _write_mm(data: CscData, fh) -> None:
    fh.write(HEADER_LINE + "\n")
    fh.write("%d %d %d\n" % (data.dims.n_rows, data.dims.n_cols, data.nnz))
    cols = data.expand_cols()
    for k in range(data.nnz):
        fh.write(
            "%d %d %.17g\n" % (data.row_indices[k] + 1, cols[k] + 1, data.values[k])
        )


def load_mm(source, lenient_duplicates: bool = False) -> SpMat:
    """Parse a Matrix Market file (path, text, or file object).

    Duplicate coordinates are an error unless `lenient_duplicates`, in
    which case they are summed.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    elif isinstance(source, str) and "\n" in source:
        lines = source.splitlines()
    else:
        lines = Path(source).read_text(encoding="ascii").splitlines()

    if not lines:
        raise MatrixMarketError("empty input", 1)
    if tuple(lines[0].split()) != _HEADER_TOKENS:
        raise MatrixMarketError(
            "header must be exactly %r" % HEADER_LINE, 1
        )

    size_line = None
    entries_start = None
    for i in range(1, len(lines)):
        stripped = lines[i].strip()
        if not stripped or stripped.startswith("%"):
            continue
        size_line = stripped
        entries_start = i + 1
        break
    if size_line is None:
        raise MatrixMarketError("missing size line", len(lines))

    parts = size_line.split()
    if len(parts) != 3:
        raise MatrixMarketError("size line needs 'rows cols nnz'", entries_start)
    try:
        n_rows, n_cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise MatrixMarketError("size line needs three integers", entries_start) from None
    dims = Dims(n_rows, n_cols)

    rows = np.empty(nnz, np.int64)
    cols = np.empty(nnz, np.int64)
    vals = np.empty(nnz, np.float64)
    k = 0
    for i in range(entries_start, len(lines)):
        stripped = lines[i].strip()
        if not stripped or stripped.startswith("%"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise MatrixMarketError("entry needs 'row col value'", i + 1)
        if k >= nnz:
            raise MatrixMarketError("more entries than the size line declares", i + 1)
        try:
            r = int(parts[0])
            c = int(parts[1])
            v = float(parts[2])
        except ValueError:
            raise MatrixMarketError("malformed entry", i + 1) from None
        if not (1 <= r <= n_rows and 1 <= c <= n_cols):
            raise CorruptionError(
                "line %d: entry (%d, %d) outside %s matrix" % (i + 1, r, c, dims)
            )
        rows[k] = r - 1
        cols[k] = c - 1
        vals[k] = v
        k += 1
    if k != nnz:
        raise MatrixMarketError(
            "size line declares %d entries, found %d" % (nnz, k), len(lines)
        )

    if nnz:
        linear = cols * n_rows + rows
        if np.unique(linear).shape[0] != nnz:
            if not lenient_duplicates:
                raise DuplicateEntryError("duplicate coordinates in input")
    return SpMat.from_csc(csc_mod.canonicalize(dims, rows, cols, vals))


def render_text(m, max_dim: int = 20) -> str:
    """Dense grid for small matrices, column-major triplet listing for
    anything with a dimension beyond `max_dim`."""
    data = _as_csc(m)
    r, c = data.dims
    out = _stdio.StringIO()
    out.write("[%s sparse, nnz=%d, density=%s]\n" % (
        data.dims, data.nnz,
        ("%.4g%%" % (100.0 * data.nnz / data.dims.n_cells)) if data.dims.n_cells else "n/a",
    ))
    if r <= max_dim and c <= max_dim:
        dense = data.to_dense()
        cells = [["%.4g" % dense[i, j] for j in range(c)] for i in range(r)]
        width = max((len(s) for row in cells for s in row), default=1)
        for i in range(r):
            out.write("  ".join(s.rjust(width) for s in cells[i]) + "\n")
    else:
        for t in data.triplets():
            out.write("(%d, %d) %.10g\n" % (t.row, t.col, t.value))
    return out.getvalue()
