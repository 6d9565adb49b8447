"""The hybrid matrix handle: one user-facing type, three storage formats.

An SpMat owns up to one instance of each format plus a validity flag
set.  Operations ask for the format they want; conversion happens
lazily, only when a cleared flag is requested, and adds validity
without revoking it.  Only mutation invalidates.  Freshly built
matrices are CSC-valid only.
"""

from __future__ import annotations

import enum
from typing import Iterator, Sequence

import numpy as np

from . import coo as coo_mod
from . import csc as csc_mod
from . import rbt as rbt_mod
from .csc import CscData, Dims, Triplet
from .coo import CooData
from .errors import DimensionError
from .rbt import RbtStore, encode_index


class Format(enum.Enum):
    CSC = "csc"
    COO = "coo"
    RBT = "rbt"


class SpMat:
    """Sparse matrix with automatic storage-format switching.

    Reads are logically const but may materialise another format
    internally; share an instance across threads only behind a lock, or
    pin it first with ``require(Format.CSC)`` and read the CSC arrays.
    """

    __slots__ = ("dims", "_csc", "_coo", "_rbt", "_valid", "_conversions")

    # keep numpy from coercing us in mixed expressions; reflected
    # operators handle ndarray @ SpMat instead
    __array_ufunc__ = None

    def __init__(self, dims: Dims, *, csc=None, coo=None, rbt=None):
        self.dims = dims
        self._csc = csc
        self._coo = coo
        self._rbt = rbt
        self._valid = {
            fmt
            for fmt, store in ((Format.CSC, csc), (Format.COO, coo), (Format.RBT, rbt))
            if store is not None
        }
        if not self._valid:
            raise ValueError("SpMat needs at least one backing representation")
        self._conversions = {Format.CSC: 0, Format.COO: 0, Format.RBT: 0}

    # -- construction -------------------------------------------------

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "SpMat":
        """Matrix with the given shape and no stored elements."""
        dims = Dims(n_rows, n_cols)
        return cls(dims, csc=csc_mod.empty(dims))

    @classmethod
    def from_triplets(cls, n_rows: int, n_cols: int, triplets: Sequence, dup=csc_mod.DUP_SUM) -> "SpMat":
        dims = Dims(n_rows, n_cols)
        return cls(dims, csc=csc_mod.from_triplets(dims, triplets, dup))

    @classmethod
    def from_csc(cls, data: CscData) -> "SpMat":
        return cls(data.dims, csc=data)

    @classmethod
    def from_dense(cls, array) -> "SpMat":
        array = np.asarray(array, dtype=np.float64)
        if array.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows, cols = np.nonzero(array)
        dims = Dims(array.shape[0], array.shape[1])
        return cls(dims, csc=csc_mod.canonicalize(dims, rows, cols, array[rows, cols]))

    # -- format plumbing ----------------------------------------------

    @property
    def valid_formats(self) -> frozenset:
        return frozenset(self._valid)

    @property
    def conversions(self) -> dict:
        """Per-format count of materialisations performed by require()."""
        return dict(self._conversions)

    def require(self, fmt: Format) -> None:
        """Make `fmt` valid, converting lazily if needed.

        Direct paths: CSC<->COO and CSC<->RBT; COO<->RBT route through
        CSC.  Already-valid formats stay valid (conversion adds, it does
        not invalidate), and an already-set flag is a no-op.
        """
        if fmt in self._valid:
            return
        if fmt is Format.CSC:
            if Format.RBT in self._valid:
                self._csc = rbt_mod.to_csc(self._rbt)
            else:
                self._csc = coo_mod.to_csc(self._coo)
        elif fmt is Format.COO:
            self.require(Format.CSC)
            self._coo = coo_mod.from_csc(self._csc)
        else:
            self.require(Format.CSC)
            self._rbt = rbt_mod.from_csc(self._csc)
        self._valid.add(fmt)
        self._conversions[fmt] += 1

    def invalidate_others(self, kept: Format) -> None:
        if kept not in self._valid:
            raise ValueError("cannot keep invalid format %s" % kept)
        for fmt in (Format.CSC, Format.COO, Format.RBT):
            if fmt is not kept:
                self._valid.discard(fmt)
        if Format.CSC not in self._valid:
            self._csc = None
        if Format.COO not in self._valid:
            self._coo = None
        if Format.RBT not in self._valid:
            self._rbt = None

    def csc(self) -> CscData:
        self.require(Format.CSC)
        return self._csc

    def coo(self) -> CooData:
        self.require(Format.COO)
        return self._coo

    def rbt(self) -> RbtStore:
        self.require(Format.RBT)
        return self._rbt

    def _any_nnz(self) -> int:
        if Format.CSC in self._valid:
            return self._csc.nnz
        if Format.RBT in self._valid:
            return self._rbt.count
        return self._coo.nnz

    # -- element access ------------------------------------------------

    def get(self, row: int, col: int) -> float:
        """Element read, routed CSC first, then RBT, converting only
        when neither is on hand."""
        csc_mod.check_coords(self.dims, row, col)
        if Format.CSC in self._valid:
            return self._csc.get(row, col)
        if Format.RBT in self._valid:
            return self._rbt.get(encode_index(row, col, self.dims.n_rows))
        self.require(Format.CSC)
        return self._csc.get(row, col)

    def set(self, row: int, col: int, value: float) -> None:
        """Element write.  Overwriting an existing nonzero while CSC is
        valid patches the value array in place; structural changes go
        through the tree."""
        csc_mod.check_coords(self.dims, row, col)
        if Format.CSC in self._valid and value != 0.0:
            data = self._csc
            start = data.col_offsets[col]
            end = data.col_offsets[col + 1]
            pos = start + np.searchsorted(data.row_indices[start:end], row)
            if pos < end and data.row_indices[pos] == row:
                data.values[pos] = value
                self.invalidate_others(Format.CSC)
                return
        self.require(Format.RBT)
        self.invalidate_others(Format.RBT)
        self._rbt.insert(encode_index(row, col, self.dims.n_rows), value)

    def accumulate(self, row: int, col: int, delta: float) -> None:
        """Add `delta` onto the element; an exact-zero result erases."""
        self.set(row, col, self.get(row, col) + delta)

    def __getitem__(self, key):
        row, col = key
        return self.get(row, col)

    def __setitem__(self, key, value):
        row, col = key
        self.set(row, col, float(value))

    def batch_insert(self, triplets: Sequence) -> None:
        """Merge a batch of triplets into the matrix (duplicates and
        existing elements combine by summation); leaves CSC as the sole
        valid format."""
        incoming = csc_mod.from_triplets(self.dims, triplets, csc_mod.DUP_SUM)
        base = self.csc()
        rows = np.concatenate([base.row_indices, incoming.row_indices])
        cols = np.concatenate([base.expand_cols(), incoming.expand_cols()])
        vals = np.concatenate([base.values, incoming.values])
        self._csc = csc_mod.canonicalize(self.dims, rows, cols, vals, csc_mod.DUP_SUM)
        self._valid = {Format.CSC}
        self._coo = None
        self._rbt = None

    # -- inspection -----------------------------------------------------

    @property
    def shape(self) -> tuple:
        return (self.dims.n_rows, self.dims.n_cols)

    @property
    def nnz(self) -> int:
        return self._any_nnz()

    @property
    def density(self) -> float:
        cells = self.dims.n_cells
        if cells == 0:
            raise DimensionError("density undefined for %s matrix" % self.dims)
        return self.nnz / cells

    def triplets(self) -> Iterator[Triplet]:
        """Stored elements in canonical column-major order (may sync)."""
        return self.csc().triplets()

    def to_dense(self) -> np.ndarray:
        return self.csc().to_dense()

    def copy(self) -> "SpMat":
        return SpMat(self.dims, csc=self.csc().copy())

    def __repr__(self):
        fmts = "+".join(sorted(f.value for f in self._valid))
        return "<SpMat %s nnz=%d formats=%s>" % (self.dims, self.nnz, fmts)

    # -- operator sugar (eager; the expr module builds lazy trees) -----

    def __add__(self, other):
        from . import ops

        return ops.add(self, other)

    def __sub__(self, other):
        from . import ops

        return ops.subtract(self, other)

    def __mul__(self, k):
        from . import ops

        return ops.scalar_mul(self, float(k))

    __rmul__ = __mul__

    def __matmul__(self, other):
        from . import ops

        if isinstance(other, SpMat):
            return ops.matmul(self, other)
        return ops.mat_times_vec(self, other)

    def __rmatmul__(self, other):
        from . import ops

        return ops.vec_times_mat(other, self)

    def t(self) -> "SpMat":
        from . import ops

        return ops.transpose(self)
