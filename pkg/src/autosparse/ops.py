"""User-facing sparse linear algebra: arithmetic, structure ops,
reductions, norms, generators, and submatrix/diagonal access.

Dense vectors are plain 1-D float64 numpy arrays.  Every operation
returns a fresh CSC-valid matrix (or a dense array / scalar); inputs
are synced to the format the kernel wants, never mutated unless the
operation's purpose is mutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import csc as csc_mod
from .csc import CscData, Dims, INDEX_MAX
from .errors import DomainError, NormOrderError, ShapeError
from .hybrid import Format, SpMat
from .rbt import encode_index


@dataclass(frozen=True)
class Span:
    """Inclusive index range, as in submatrix selection."""

    first: int
    last: int

    def __post_init__(self):
        if self.first < 0 or self.last < self.first:
            raise ShapeError("invalid span [%d, %d]" % (self.first, self.last))

    def __len__(self):
        return self.last - self.first + 1


def _as_span(s) -> Span:
    if isinstance(s, Span):
        return s
    first, last = s
    return Span(int(first), int(last))


def _wrap(data: CscData) -> SpMat:
    return SpMat.from_csc(data)


def _combine(a: SpMat, b: SpMat, alpha: float, beta: float) -> SpMat:
    if a.dims != b.dims:
        raise ShapeError("element-wise combination needs equal shapes", a.dims, b.dims)
    ma, mb = a.csc(), b.csc()
    vals, rows, offs = _kernels.linear_combine(
        a.dims.n_cols,
        ma.values, ma.row_indices, ma.col_offsets,
        mb.values, mb.row_indices, mb.col_offsets,
        alpha, beta,
    )
    return _wrap(CscData(a.dims, vals, rows, offs))


def add(a: SpMat, b: SpMat) -> SpMat:
    return _combine(a, b, 1.0, 1.0)


def subtract(a: SpMat, b: SpMat) -> SpMat:
    return _combine(a, b, 1.0, -1.0)


def scaled_sum(a: SpMat, b: SpMat, k: float) -> SpMat:
    """k*(A + B) in a single merge pass (scale during the merge)."""
    return _combine(a, b, k, k)


def scalar_mul(a: SpMat, k: float) -> SpMat:
    m = a.csc()
    if k == 0.0:
        return SpMat.zeros(*a.shape)
    vals = m.values * k
    if (vals == 0.0).any():  # underflow can zero entries; keep canonical
        return _wrap(csc_mod.canonicalize(a.dims, m.row_indices, m.expand_cols(), vals))
    return _wrap(CscData(a.dims, vals, m.row_indices.copy(), m.col_offsets.copy()))


def vec_times_mat(v, a: SpMat) -> np.ndarray:
    """Row vector times matrix; w[j] accumulates over column j's entries."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != a.dims.n_rows:
        raise ShapeError(
            "vector of length %d cannot left-multiply" % v.shape[0], a.dims
        )
    m = a.csc()
    return _kernels.vec_times_mat(v, m.values, m.row_indices, m.col_offsets, a.dims.n_cols)


def mat_times_vec(a: SpMat, x) -> np.ndarray:
    """Matrix times column vector; scatters each column scaled by x[j]."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != a.dims.n_cols:
        raise ShapeError(
            "vector of length %d cannot right-multiply" % x.shape[0], a.dims
        )
    m = a.csc()
    return _kernels.mat_times_vec(
        m.values, m.row_indices, m.col_offsets, x, a.dims.n_rows, a.dims.n_cols
    )


def matmul(a: SpMat, b: SpMat) -> SpMat:
    if a.dims.n_cols != b.dims.n_rows:
        raise ShapeError("inner dimensions differ", a.dims, b.dims)
    ma, mb = a.csc(), b.csc()
    vals, rows, offs = _kernels.spgemm(
        a.dims.n_rows,
        ma.values, ma.row_indices, ma.col_offsets,
        mb.values, mb.row_indices, mb.col_offsets,
        b.dims.n_cols,
    )
    return _wrap(CscData(Dims(a.dims.n_rows, b.dims.n_cols), vals, rows, offs))


def transpose(a: SpMat) -> SpMat:
    m = a.csc()
    vals, rows, offs = _kernels.transpose(
        a.dims.n_rows, a.dims.n_cols, m.values, m.row_indices, m.col_offsets
    )
    return _wrap(CscData(Dims(a.dims.n_cols, a.dims.n_rows), vals, rows, offs))


def kron(a: SpMat, b: SpMat) -> SpMat:
    ar, ac = a.shape
    br, bc = b.shape
    if (ar and br > INDEX_MAX // max(ar, 1)) or (ac and bc > INDEX_MAX // max(ac, 1)):
        raise ShapeError("Kronecker result overflows the index type", a.dims, b.dims)
    dims = Dims(ar * br, ac * bc)
    ma, mb = a.csc(), b.csc()
    if ma.nnz == 0 or mb.nnz == 0:
        return SpMat.zeros(*dims)
    rows = (ma.row_indices[:, None] * br + mb.row_indices[None, :]).ravel()
    cols = (ma.expand_cols()[:, None] * bc + mb.expand_cols()[None, :]).ravel()
    vals = (ma.values[:, None] * mb.values[None, :]).ravel()
    return _wrap(csc_mod.canonicalize(dims, rows, cols, vals))


def repmat(a: SpMat, reps_r: int, reps_c: int) -> SpMat:
    if reps_r < 1 or reps_c < 1:
        raise ShapeError("replication counts must be at least 1, got (%d, %d)" % (reps_r, reps_c))
    r, c = a.shape
    if (r and reps_r > INDEX_MAX // max(r, 1)) or (c and reps_c > INDEX_MAX // max(c, 1)):
        raise ShapeError("replicated result overflows the index type", a.dims)
    dims = Dims(r * reps_r, c * reps_c)
    m = a.csc()
    rows = m.row_indices
    cols = m.expand_cols()
    vals = m.values
    rows = np.concatenate([rows + i * r for i in range(reps_r)])
    cols = np.tile(cols, reps_r)
    vals = np.tile(vals, reps_r)
    rows = np.tile(rows, reps_c)
    cols = np.concatenate([cols + j * c for j in range(reps_c)])
    vals = np.tile(vals, reps_c)
    return _wrap(csc_mod.canonicalize(dims, rows, cols, vals))


def _reduce(a: SpMat, kind: str, dim: int):
    m = a.csc()
    r, c = a.shape
    if dim == 0:
        if r == 0:
            raise ShapeError("cannot reduce over zero rows", a.dims)
        labels, length, full = m.expand_cols(), c, r
    elif dim == 1:
        if c == 0:
            raise ShapeError("cannot reduce over zero columns", a.dims)
        labels, length, full = m.row_indices, r, c
    else:
        raise ValueError("dim must be 0 (per column) or 1 (per row)")
    counts = np.bincount(labels, minlength=length)
    if kind == "sum":
        out = np.zeros(length)
        np.add.at(out, labels, m.values)
        return out
    if kind == "min":
        out = np.full(length, np.inf)
        np.minimum.at(out, labels, m.values)
        # a slice that is not fully dense logically contains zeros
        return np.where(counts < full, np.minimum(out, 0.0), out)
    out = np.full(length, -np.inf)
    np.maximum.at(out, labels, m.values)
    return np.where(counts < full, np.maximum(out, 0.0), out)


def sum_dim(a: SpMat, dim: int = 0) -> np.ndarray:
    """Sum per column (dim=0) or per row (dim=1)."""
    return _reduce(a, "sum", dim)


def min_dim(a: SpMat, dim: int = 0) -> np.ndarray:
    """Minimum per column/row over all logical entries, so an implicit
    zero competes whenever the slice is not fully dense."""
    return _reduce(a, "min", dim)


def max_dim(a: SpMat, dim: int = 0) -> np.ndarray:
    return _reduce(a, "max", dim)


def trace(a: SpMat) -> float:
    m = a.csc()
    on_diag = m.row_indices == m.expand_cols()
    return float(m.values[on_diag].sum())


def _vector_norm(values: np.ndarray, p) -> float:
    if values.size == 0:
        return 0.0
    if p == np.inf or p == "inf":
        return float(np.abs(values).max())
    if p == "fro":
        p = 2
    p = float(p)
    if p < 1:
        raise NormOrderError("vector norm requires p >= 1 or inf, got %r" % p)
    return float((np.abs(values) ** p).sum() ** (1.0 / p))


def norm(x: SpMat, p=2) -> float:
    """p-norm of a vector (1 x n or n x 1) or matrix.

    Vectors take any p >= 1 or inf; matrices take 1, inf, or "fro".
    Implicit zeros contribute nothing.
    """
    m = x.csc()
    r, c = x.shape
    if r == 1 or c == 1:
        return _vector_norm(m.values, p)
    if p == "fro":
        return float(np.sqrt((m.values**2).sum()))
    if p == 1:
        sums = np.zeros(c)
        np.add.at(sums, m.expand_cols(), np.abs(m.values))
        return float(sums.max()) if c else 0.0
    if p == np.inf or p == "inf":
        sums = np.zeros(r)
        np.add.at(sums, m.row_indices, np.abs(m.values))
        return float(sums.max()) if r else 0.0
    raise NormOrderError("matrix norm supports p in {1, inf, 'fro'}, got %r" % (p,))


def normalise(x: SpMat, p=2, dim: int = 0) -> SpMat:
    """Scale each column (dim=0) or row (dim=1) to unit p-norm;
    all-zero slices are left untouched."""
    m = x.csc()
    r, c = x.shape
    if dim == 0:
        labels, length = m.expand_cols(), c
    elif dim == 1:
        labels, length = m.row_indices, r
    else:
        raise ValueError("dim must be 0 (columns) or 1 (rows)")
    if p == np.inf or p == "inf":
        norms = np.zeros(length)
        np.maximum.at(norms, labels, np.abs(m.values))
    else:
        pf = 2.0 if p == "fro" else float(p)
        if pf < 1:
            raise NormOrderError("normalise requires p >= 1 or inf, got %r" % p)
        acc = np.zeros(length)
        np.add.at(acc, labels, np.abs(m.values) ** pf)
        norms = acc ** (1.0 / pf)
    norms[norms == 0.0] = 1.0
    vals = m.values / norms[labels]
    return _wrap(csc_mod.canonicalize(x.dims, m.row_indices, m.expand_cols(), vals))


def submat(a: SpMat, rows, cols) -> SpMat:
    """Copy of the inclusive window, re-indexed to the origin."""
    rs, cs = _as_span(rows), _as_span(cols)
    if rs.last >= a.dims.n_rows or cs.last >= a.dims.n_cols:
        raise ShapeError(
            "span [%d,%d]x[%d,%d] outside matrix" % (rs.first, rs.last, cs.first, cs.last),
            a.dims,
        )
    m = a.csc()
    ecols = m.expand_cols()
    mask = (
        (m.row_indices >= rs.first)
        & (m.row_indices <= rs.last)
        & (ecols >= cs.first)
        & (ecols <= cs.last)
    )
    dims = Dims(len(rs), len(cs))
    return _wrap(
        csc_mod.canonicalize(
            dims, m.row_indices[mask] - rs.first, ecols[mask] - cs.first, m.values[mask]
        )
    )


def set_submat(a: SpMat, rows, cols, src: SpMat) -> None:
    """Replace the window's element set with src's (window elements
    absent from src are removed); writes are routed through the tree."""
    rs, cs = _as_span(rows), _as_span(cols)
    if rs.last >= a.dims.n_rows or cs.last >= a.dims.n_cols:
        raise ShapeError(
            "span [%d,%d]x[%d,%d] outside matrix" % (rs.first, rs.last, cs.first, cs.last),
            a.dims,
        )
    if src.shape != (len(rs), len(cs)):
        raise ShapeError("source shape does not match window", src.dims, Dims(len(rs), len(cs)))
    src_data = src.csc().copy()  # snapshot first: src may alias a
    m = a.csc()
    ecols = m.expand_cols()
    mask = (
        (m.row_indices >= rs.first)
        & (m.row_indices <= rs.last)
        & (ecols >= cs.first)
        & (ecols <= cs.last)
    )
    old_rows = m.row_indices[mask]
    old_cols = ecols[mask]
    n_rows = a.dims.n_rows
    a.require(Format.RBT)
    a.invalidate_others(Format.RBT)
    tree = a.rbt()
    for i in range(old_rows.shape[0]):
        tree.erase(encode_index(int(old_rows[i]), int(old_cols[i]), n_rows))
    for r, c, v in src_data.triplets():
        tree.insert(encode_index(rs.first + r, cs.first + c, n_rows), v)


def _diag_geometry(dims: Dims, k: int) -> tuple:
    if k >= 0:
        length = min(dims.n_rows, dims.n_cols - k)
    else:
        length = min(dims.n_rows + k, dims.n_cols)
    if length <= 0:
        raise ShapeError("diagonal %d outside matrix" % k, dims)
    row0 = -k if k < 0 else 0
    col0 = k if k >= 0 else 0
    return length, row0, col0


def diag(a: SpMat, k: int = 0) -> np.ndarray:
    """Dense copy of diagonal k (k > 0 above the main diagonal)."""
    length, _row0, _col0 = _diag_geometry(a.dims, k)
    m = a.csc()
    ecols = m.expand_cols()
    mask = ecols - m.row_indices == k
    out = np.zeros(length)
    pos = m.row_indices[mask] if k >= 0 else ecols[mask]
    out[pos] = m.values[mask]
    return out


def set_diag(a: SpMat, k: int, values) -> None:
    """Write every slot of diagonal k (zeros erase)."""
    values = np.asarray(values, dtype=np.float64)
    length, row0, col0 = _diag_geometry(a.dims, k)
    if values.ndim != 1 or values.shape[0] != length:
        raise ShapeError(
            "diagonal %d has length %d, got vector of %d" % (k, length, values.shape[0])
        )
    for t in range(length):
        a.set(row0 + t, col0 + t, float(values[t]))


def speye(n_rows: int, n_cols: int) -> SpMat:
    """Identity-pattern matrix: ones at (i, i) for i < min(dims)."""
    dims = Dims(n_rows, n_cols)
    n = min(n_rows, n_cols)
    idx = np.arange(n, dtype=np.int64)
    return _wrap(csc_mod.canonicalize(dims, idx, idx, np.ones(n)))


def _sample_positions(n_cells: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct linear positions, uniform without replacement.

    Batched rejection keeps memory O(k); dense targets fall back to a
    full permutation.
    """
    if k == 0:
        return np.empty(0, np.int64)
    if k > n_cells // 2:
        return rng.permutation(n_cells)[:k].astype(np.int64)
    taken = np.empty(0, np.int64)
    need = k
    while need > 0:
        batch = rng.integers(0, n_cells, size=max(need + need // 4 + 16, 64))
        _, first = np.unique(batch, return_index=True)
        batch = batch[np.sort(first)]
        if taken.size:
            batch = batch[~np.isin(batch, taken)]
        taken = np.concatenate([taken, batch[:need]])
        need = k - taken.shape[0]
    return taken


def sprandu(n_rows: int, n_cols: int, density: float, seed=None) -> SpMat:
    """Random matrix with exactly round(density * cells) distinct
    positions, values uniform on (0, 1); deterministic per seed."""
    if not 0.0 <= density <= 1.0:
        raise DomainError("density must lie in [0, 1], got %r" % density)
    dims = Dims(n_rows, n_cols)
    k = int(np.floor(density * dims.n_cells + 0.5))
    rng = np.random.default_rng(seed)
    pos = _sample_positions(dims.n_cells, k, rng)
    vals = rng.random(k)
    while True:
        zero = vals == 0.0
        if not zero.any():
            break
        vals[zero] = rng.random(int(zero.sum()))
    rows = pos % max(n_rows, 1)
    cols = pos // max(n_rows, 1)
    return _wrap(csc_mod.canonicalize(dims, rows, cols, vals))
