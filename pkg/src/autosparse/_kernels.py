"""Compiled kernels over raw CSC arrays.

All functions take the flat (values, row_indices, col_offsets) arrays
rather than wrapper objects so numba can compile them once and the
benchmark drivers can reuse them without Python in the loop.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def linear_combine(n_cols, a_vals, a_rows, a_offs, b_vals, b_rows, b_offs, alpha, beta):
    """alpha*A + beta*B column by column via a two-pointer row merge.

    Inputs must be canonical; output is canonical with exact zeros
    pruned.  Returns (values, rows, offsets).
    """
    max_nnz = a_vals.shape[0] + b_vals.shape[0]
    out_vals = np.empty(max_nnz, np.float64)
    out_rows = np.empty(max_nnz, np.int64)
    out_offs = np.zeros(n_cols + 1, np.int64)
    k = 0
    for j in range(n_cols):
        ia = a_offs[j]
        ib = b_offs[j]
        ea = a_offs[j + 1]
        eb = b_offs[j + 1]
        while ia < ea or ib < eb:
            if ib >= eb or (ia < ea and a_rows[ia] < b_rows[ib]):
                v = alpha * a_vals[ia]
                r = a_rows[ia]
                ia += 1
            elif ia >= ea or b_rows[ib] < a_rows[ia]:
                v = beta * b_vals[ib]
                r = b_rows[ib]
                ib += 1
            else:
                v = alpha * a_vals[ia] + beta * b_vals[ib]
                r = a_rows[ia]
                ia += 1
                ib += 1
            if v != 0.0:
                out_vals[k] = v
                out_rows[k] = r
                k += 1
        out_offs[j + 1] = k
    return out_vals[:k].copy(), out_rows[:k].copy(), out_offs


@njit(cache=True)
def spgemm(n_rows_a, a_vals, a_rows, a_offs, b_vals, b_rows, b_offs, n_cols_b):
    """Gustavson product: each output column is accumulated in a dense
    scratch array guarded by generation stamps, so the scratch is never
    cleared between columns.  Two passes: symbolic sizing, then numeric
    fill with per-column row sort; exact zeros are pruned at the end.
    """
    stamp = np.full(n_rows_a, -1, np.int64)
    counts = np.zeros(n_cols_b, np.int64)
    for j in range(n_cols_b):
        for kk in range(b_offs[j], b_offs[j + 1]):
            k = b_rows[kk]
            for ii in range(a_offs[k], a_offs[k + 1]):
                i = a_rows[ii]
                if stamp[i] != j:
                    stamp[i] = j
                    counts[j] += 1
    upper = np.zeros(n_cols_b + 1, np.int64)
    for j in range(n_cols_b):
        upper[j + 1] = upper[j] + counts[j]

    acc = np.zeros(n_rows_a, np.float64)
    stamp[:] = -1
    tmp_rows = np.empty(upper[n_cols_b], np.int64)
    out_vals = np.empty(upper[n_cols_b], np.float64)
    out_rows = np.empty(upper[n_cols_b], np.int64)
    out_offs = np.zeros(n_cols_b + 1, np.int64)
    nnz = 0
    for j in range(n_cols_b):
        touched = 0
        base = upper[j]
        for kk in range(b_offs[j], b_offs[j + 1]):
            k = b_rows[kk]
            bv = b_vals[kk]
            for ii in range(a_offs[k], a_offs[k + 1]):
                i = a_rows[ii]
                if stamp[i] != j:
                    stamp[i] = j
                    acc[i] = a_vals[ii] * bv
                    tmp_rows[base + touched] = i
                    touched += 1
                else:
                    acc[i] += a_vals[ii] * bv
        seg = np.sort(tmp_rows[base : base + touched])
        for t in range(touched):
            r = seg[t]
            v = acc[r]
            if v != 0.0:
                out_rows[nnz] = r
                out_vals[nnz] = v
                nnz += 1
        out_offs[j + 1] = nnz
    return out_vals[:nnz].copy(), out_rows[:nnz].copy(), out_offs


@njit(cache=True)
def vec_times_mat(v, vals, rows, offs, n_cols):
    """Row vector times matrix: w[j] = sum_r v[r] * A[r, j]."""
    w = np.zeros(n_cols, np.float64)
    for j in range(n_cols):
        s = 0.0
        for k in range(offs[j], offs[j + 1]):
            s += v[rows[k]] * vals[k]
        w[j] = s
    return w


@njit(cache=True)
def mat_times_vec(vals, rows, offs, x, n_rows, n_cols):
    """Matrix times column vector: y[r] += A[r, j] * x[j] per column."""
    y = np.zeros(n_rows, np.float64)
    for j in range(n_cols):
        xj = x[j]
        if xj != 0.0:
            for k in range(offs[j], offs[j + 1]):
                y[rows[k]] += vals[k] * xj
    return y


@njit(cache=True)
def transpose(n_rows, n_cols, vals, rows, offs):
    """Counting-sort transpose: histogram the rows, prefix-sum into
    offsets, scatter.  Linear in nnz plus both dimension counts."""
    nnz = vals.shape[0]
    t_offs = np.zeros(n_rows + 1, np.int64)
    for k in range(nnz):
        t_offs[rows[k] + 1] += 1
    for i in range(n_rows):
        t_offs[i + 1] += t_offs[i]
    cursor = t_offs[:-1].copy()
    t_vals = np.empty(nnz, np.float64)
    t_rows = np.empty(nnz, np.int64)
    for j in range(n_cols):
        for k in range(offs[j], offs[j + 1]):
            i = rows[k]
            pos = cursor[i]
            cursor[i] = pos + 1
            t_rows[pos] = j
            t_vals[pos] = vals[k]
    return t_vals, t_rows, t_offs


@njit(cache=True)
def fused_trace(n_cols, a_vals, a_rows, a_offs, b_vals, b_rows, b_offs):
    """trace(A^T B) as sum of products over coincident nonzeros: a
    column-aligned two-pointer merge, no transpose and no product
    matrix.  O(nnz(A) + nnz(B))."""
    total = 0.0
    for j in range(n_cols):
        ia = a_offs[j]
        ib = b_offs[j]
        ea = a_offs[j + 1]
        eb = b_offs[j + 1]
        while ia < ea and ib < eb:
            ra = a_rows[ia]
            rb = b_rows[ib]
            if ra == rb:
                total += a_vals[ia] * b_vals[ib]
                ia += 1
                ib += 1
            elif ra < rb:
                ia += 1
            else:
                ib += 1
    return total
