"""Coordinate-list storage: three parallel arrays (rows, cols, values).

Redundant next to CSC, but every element's coordinates sit in plain
arrays, so bulk coordinate transforms (circular shifts) are direct
array arithmetic.  Non-canonical order is allowed between a bulk
transform and the next canonicalisation.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from . import csc
from .csc import CscData, Dims, Triplet
from .errors import CorruptionError


class CooData:
    __slots__ = ("dims", "rows", "cols", "values")

    def __init__(self, dims: Dims, rows, cols, values):
        self.dims = dims
        self.rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.int64)
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        if not (self.rows.shape == self.cols.shape == self.values.shape):
            raise CorruptionError("rows, cols and values must have identical length")

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def triplets(self) -> Iterator[Triplet]:
        for k in range(self.nnz):
            yield Triplet(int(self.rows[k]), int(self.cols[k]), float(self.values[k]))

    def copy(self) -> "CooData":
        return CooData(self.dims, self.rows.copy(), self.cols.copy(), self.values.copy())

    def __repr__(self):
        return "<CooData %s nnz=%d>" % (self.dims, self.nnz)


def from_csc(m: CscData) -> CooData:
    """Expand a canonical CSC matrix; result is in canonical COO order."""
    return CooData(m.dims, m.row_indices.copy(), m.expand_cols(), m.values.copy())


def to_csc(m: CooData) -> CscData:
    """Canonicalise into CSC: column-major sort, duplicates summed,
    exact zeros pruned.  Input order is irrelevant."""
    if m.nnz:
        bad = (m.rows < 0) | (m.rows >= m.dims.n_rows) | (m.cols < 0) | (m.cols >= m.dims.n_cols)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise CorruptionError(
                "stored coordinate %d = (%d, %d) outside %s matrix"
                % (k, m.rows[k], m.cols[k], m.dims)
            )
    return csc.canonicalize(m.dims, m.rows, m.cols, m.values, csc.DUP_SUM)


def shift(m: CooData, row_shift: int, col_shift: int) -> CooData:
    """Circular shift of all coordinates; values untouched, any shift
    magnitude accepted (reduced modulo the dimension).  The result may
    be non-canonical."""
    if m.nnz == 0:
        return m.copy()
    return CooData(
        m.dims,
        (m.rows + row_shift) % m.dims.n_rows,
        (m.cols + col_shift) % m.dims.n_cols,
        m.values.copy(),
    )
