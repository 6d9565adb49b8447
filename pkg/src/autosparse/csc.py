"""Compressed Sparse Column storage.

The canonical at-rest representation: three contiguous arrays (values,
row indices, column offsets), column-major sorted, duplicate-free and
zero-free.  Everything else in the package converts to or from this.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import CoordinateError, CorruptionError

INDEX_MAX = np.iinfo(np.int64).max

DUP_SUM = "sum"
DUP_LAST = "last"


@dataclass(frozen=True)
class Dims:
    """Matrix shape. Either dimension may be zero."""

    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise ValueError("dimensions must be non-negative, got %r" % (self,))
        if self.n_rows and self.n_cols > INDEX_MAX // self.n_rows:
            raise ValueError("n_rows * n_cols overflows the 64-bit index type")

    @property
    def n_cells(self) -> int:
        return self.n_rows * self.n_cols

    def __iter__(self):
        return iter((self.n_rows, self.n_cols))

    def __str__(self):
        return "%dx%d" % (self.n_rows, self.n_cols)


class Triplet(NamedTuple):
    row: int
    col: int
    value: float


class CscData:
    """Canonical CSC matrix data.

    Immutable by convention for all read paths; the only sanctioned
    mutation is an in-place value overwrite under exclusive access.
    """

    __slots__ = ("dims", "values", "row_indices", "col_offsets")

    def __init__(self, dims: Dims, values, row_indices, col_offsets):
        self.dims = dims
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        self.row_indices = np.ascontiguousarray(row_indices, dtype=np.int64)
        self.col_offsets = np.ascontiguousarray(col_offsets, dtype=np.int64)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def get(self, row: int, col: int) -> float:
        """Stored value at (row, col), or 0.0 when the slot is empty.

        Offset lookup into the column followed by a binary search over
        that column's row indices.
        """
        check_coords(self.dims, row, col)
        start = self.col_offsets[col]
        end = self.col_offsets[col + 1]
        pos = start + np.searchsorted(self.row_indices[start:end], row)
        if pos < end and self.row_indices[pos] == row:
            return float(self.values[pos])
        return 0.0

    def col_count(self, col: int) -> int:
        """Number of stored elements in a column: offsets[col+1] - offsets[col]."""
        if not 0 <= col < self.dims.n_cols:
            raise CoordinateError(
                "column %d outside matrix with %d columns" % (col, self.dims.n_cols)
            )
        return int(self.col_offsets[col + 1] - self.col_offsets[col])

    def triplets(self) -> Iterator[Triplet]:
        """Yield stored elements in column-major order."""
        offs = self.col_offsets
        for col in range(self.dims.n_cols):
            for k in range(offs[col], offs[col + 1]):
                yield Triplet(int(self.row_indices[k]), col, float(self.values[k]))

    def expand_cols(self) -> np.ndarray:
        """Column index of every stored element (length nnz)."""
        return np.repeat(
            np.arange(self.dims.n_cols, dtype=np.int64), np.diff(self.col_offsets)
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.dims.n_rows, self.dims.n_cols))
        dense[self.row_indices, self.expand_cols()] = self.values
        return dense

    def copy(self) -> "CscData":
        return CscData(
            self.dims,
            self.values.copy(),
            self.row_indices.copy(),
            self.col_offsets.copy(),
        )

    def same_elements(self, other: "CscData") -> bool:
        return (
            self.dims == other.dims
            and self.nnz == other.nnz
            and np.array_equal(self.row_indices, other.row_indices)
            and np.array_equal(self.col_offsets, other.col_offsets)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return "<CscData %s nnz=%d>" % (self.dims, self.nnz)


def check_coords(dims: Dims, row: int, col: int) -> None:
    if not (0 <= row < dims.n_rows and 0 <= col < dims.n_cols):
        raise CoordinateError("coordinate (%d, %d) outside %s matrix" % (row, col, dims))


def empty(dims: Dims) -> CscData:
    return CscData(
        dims,
        np.empty(0, np.float64),
        np.empty(0, np.int64),
        np.zeros(dims.n_cols + 1, np.int64),
    )


def canonicalize(
    dims: Dims,
    rows: np.ndarray,
    cols: np.ndarray,
    values: np.ndarray,
    dup: str = DUP_SUM,
) -> CscData:
    """Build canonical CSC from parallel coordinate arrays.

    Sorts column-major (stable), combines duplicates per `dup`, prunes
    exact zeros.  Coordinates must already be validated by the caller.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    n = rows.shape[0]
    if n == 0:
        return empty(dims)

    order = np.lexsort((rows, cols))
    rows = rows[order]
    cols = cols[order]
    values = values[order]

    linear = cols * dims.n_rows + rows
    starts = np.empty(n, dtype=bool)
    starts[0] = True
    np.not_equal(linear[1:], linear[:-1], out=starts[1:])
    start_idx = np.flatnonzero(starts)

    if dup == DUP_SUM:
        combined = np.add.reduceat(values, start_idx)
    elif dup == DUP_LAST:
        last_idx = np.append(start_idx[1:], n) - 1
        combined = values[last_idx]
    else:
        raise ValueError("unknown duplicate policy %r" % (dup,))

    keep = combined != 0.0
    rows = rows[start_idx][keep]
    cols = cols[start_idx][keep]
    values = combined[keep]

    col_offsets = np.zeros(dims.n_cols + 1, np.int64)
    np.cumsum(np.bincount(cols, minlength=dims.n_cols), out=col_offsets[1:])
    return CscData(dims, values, rows, col_offsets)


def _coords_from_triplets(triplets: Sequence) -> tuple:
    n = len(triplets)
    rows = np.empty(n, np.int64)
    cols = np.empty(n, np.int64)
    values = np.empty(n, np.float64)
    for i, (r, c, v) in enumerate(triplets):
        rows[i] = r
        cols[i] = c
        values[i] = v
    return rows, cols, values


def from_triplets(dims: Dims, triplets: Sequence, dup: str = DUP_SUM) -> CscData:
    """Batch-build canonical CSC from (row, col, value) triples.

    Duplicates are combined per `dup` ("sum" or "last"); entries whose
    combined value is exactly 0.0 are dropped.
    """
    rows, cols, values = _coords_from_triplets(triplets)
    bad = (rows < 0) | (rows >= dims.n_rows) | (cols < 0) | (cols >= dims.n_cols)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise CoordinateError(
            "triplet %d = (%d, %d, %g) outside %s matrix"
            % (i, rows[i], cols[i], values[i], dims)
        )
    return canonicalize(dims, rows, cols, values, dup)


@njit(cache=True)
def _locate(row_indices, start, end, row):
    """Binary search for `row` in row_indices[start:end].

    Returns the insertion position; position == end or a different
    stored row there means the element is absent.
    """
    lo = start
    hi = end
    while lo < hi:
        mid = (lo + hi) // 2
        if row_indices[mid] < row:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _insert_realloc(values, row_indices, col_offsets, pos, col, row, value):
    """Worst-case CSC insertion: allocate three larger arrays, copy
    everything across, place the new element, bump later offsets."""
    n = values.shape[0]
    new_values = np.empty(n + 1, np.float64)
    new_rows = np.empty(n + 1, np.int64)
    new_offsets = np.empty(col_offsets.shape[0], np.int64)
    for i in range(pos):
        new_values[i] = values[i]
        new_rows[i] = row_indices[i]
    new_values[pos] = value
    new_rows[pos] = row
    for i in range(pos, n):
        new_values[i + 1] = values[i]
        new_rows[i + 1] = row_indices[i]
    for i in range(col_offsets.shape[0]):
        if i > col:
            new_offsets[i] = col_offsets[i] + 1
        else:
            new_offsets[i] = col_offsets[i]
    return new_values, new_rows, new_offsets


@njit(cache=True)
def _shift_insert(values, row_indices, col_offsets, nnz, pos, col, row, value):
    """Insert into oversized arrays: shift the tail right one slot (a
    no-op when appending past all existing elements), no reallocation."""
    for i in range(nnz, pos, -1):
        values[i] = values[i - 1]
        row_indices[i] = row_indices[i - 1]
    values[pos] = value
    row_indices[pos] = row
    for i in range(col + 1, col_offsets.shape[0]):
        col_offsets[i] += 1


def insert_naive(m: CscData, t) -> CscData:
    """Insert one element the slow way: reallocate and copy all three
    arrays (the worst-case cost model of plain CSC).

    An already-stored coordinate is overwritten in place, without
    reallocation, and `m` itself is returned.
    """
    row, col, value = t
    check_coords(m.dims, row, col)
    if value == 0.0:
        raise ValueError("cannot store an exact zero; use the matrix-level write API")
    start = m.col_offsets[col]
    end = m.col_offsets[col + 1]
    pos = int(_locate(m.row_indices, start, end, row))
    if pos < end and m.row_indices[pos] == row:
        m.values[pos] = value
        return m
    values, rows, offsets = _insert_realloc(
        m.values, m.row_indices, m.col_offsets, pos, col, row, value
    )
    return CscData(m.dims, values, rows, offsets)


class OversizedCsc:
    """CSC with reserved capacity, so insertion shifts at most the tail
    and appends past all previous elements touch nothing at all.

    Capacity doubles on exhaustion; initial reserve is max(16, reserve).
    """

    def __init__(self, dims: Dims, reserve: int = 0):
        self.dims = dims
        cap = max(16, reserve)
        self._values = np.empty(cap, np.float64)
        self._rows = np.empty(cap, np.int64)
        self.col_offsets = np.zeros(dims.n_cols + 1, np.int64)
        self.nnz = 0

    @property
    def capacity(self) -> int:
        return int(self._values.shape[0])

    @property
    def values(self) -> np.ndarray:
        return self._values[: self.nnz]

    @property
    def row_indices(self) -> np.ndarray:
        return self._rows[: self.nnz]

    def _grow(self):
        cap = self.capacity * 2
        values = np.empty(cap, np.float64)
        rows = np.empty(cap, np.int64)
        values[: self.nnz] = self._values[: self.nnz]
        rows[: self.nnz] = self._rows[: self.nnz]
        self._values = values
        self._rows = rows

    def insert(self, row: int, col: int, value: float) -> None:
        check_coords(self.dims, row, col)
        if value == 0.0:
            raise ValueError("cannot store an exact zero; use the matrix-level write API")
        start = self.col_offsets[col]
        end = self.col_offsets[col + 1]
        pos = int(_locate(self._rows, start, end, row))
        if pos < end and self._rows[pos] == row:
            self._values[pos] = value
            return
        if self.nnz == self.capacity:
            self._grow()
        _shift_insert(self._values, self._rows, self.col_offsets, self.nnz, pos, col, row, value)
        self.nnz += 1

    def to_csc(self) -> CscData:
        return CscData(
            self.dims,
            self._values[: self.nnz].copy(),
            self._rows[: self.nnz].copy(),
            self.col_offsets.copy(),
        )


def validate(m: CscData) -> None:
    """Canonical-form checker: raises CorruptionError on any violation."""
    dims = m.dims
    n = m.nnz
    if m.col_offsets.shape[0] != dims.n_cols + 1:
        raise CorruptionError("column offsets array has wrong length")
    if dims.n_cols >= 0 and (m.col_offsets[0] != 0 or m.col_offsets[-1] != n):
        raise CorruptionError("column offsets must start at 0 and end at nnz")
    if (np.diff(m.col_offsets) < 0).any():
        raise CorruptionError("column offsets must be non-decreasing")
    if m.row_indices.shape[0] != n:
        raise CorruptionError("row index array length differs from value array")
    if n:
        if m.row_indices.min() < 0 or m.row_indices.max() >= dims.n_rows:
            raise CorruptionError("row index outside matrix")
        for col in range(dims.n_cols):
            seg = m.row_indices[m.col_offsets[col] : m.col_offsets[col + 1]]
            if seg.shape[0] > 1 and not (seg[1:] > seg[:-1]).all():
                raise CorruptionError("rows in column %d not strictly increasing" % col)
        if (m.values == 0.0).any():
            raise CorruptionError("exact zero stored in values array")
