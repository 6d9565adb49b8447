"""Shared fixtures and the dense shadow oracle used across the suite.

The oracle is deliberately naive: plain 2-D numpy arrays, column-major
scans, no sparse machinery.  Anything the library computes gets checked
against this independent path.
"""

import numpy as np
import pytest

from autosparse import Dims, SpMat
from autosparse import csc as csc_mod

TOL = 1e-12


def dense_from_triplets(n_rows, n_cols, triplets, dup="sum"):
    """Independent reference: apply triplets to a dense array."""
    d = np.zeros((n_rows, n_cols))
    for r, c, v in triplets:
        if dup == "sum":
            d[r, c] += v
        else:
            d[r, c] = v
    return d


def dense_triplets(dense):
    """Column-major scan of a dense array emitting nonzero triples."""
    out = []
    n_rows, n_cols = dense.shape
    for c in range(n_cols):
        for r in range(n_rows):
            if dense[r, c] != 0.0:
                out.append((r, c, float(dense[r, c])))
    return out


def random_dense(rng, n_rows, n_cols, density):
    """Dense array with approximately the requested nonzero density."""
    d = np.zeros((n_rows, n_cols))
    k = int(round(density * n_rows * n_cols))
    if k == 0:
        return d
    pos = rng.choice(n_rows * n_cols, size=min(k, n_rows * n_cols), replace=False)
    vals = rng.uniform(-1.0, 1.0, size=pos.shape[0])
    vals[vals == 0.0] = 0.5
    d[pos % n_rows, pos // n_rows] = vals
    return d


def make_pair(rng, n_rows, n_cols, density):
    """(SpMat, matching dense oracle array)."""
    d = random_dense(rng, n_rows, n_cols, density)
    return SpMat.from_triplets(n_rows, n_cols, dense_triplets(d)), d


def assert_matches_dense(m, dense, tol=TOL):
    """Stored coordinate sets must match the oracle's nonzeros exactly;
    values elementwise within |delta| <= tol * max(1, |oracle|)."""
    data = m.csc() if isinstance(m, SpMat) else m
    csc_mod.validate(data)
    assert data.dims == Dims(dense.shape[0], dense.shape[1])
    got = [(t.row, t.col) for t in data.triplets()]
    want = [(r, c) for r, c, _ in dense_triplets(dense)]
    assert got == want, "stored coordinate sets differ"
    for t in data.triplets():
        ref = dense[t.row, t.col]
        assert abs(t.value - ref) <= tol * max(1.0, abs(ref))


def assert_close(a, b, tol=TOL):
    assert abs(a - b) <= tol * max(1.0, abs(b))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
