"""User-facing operations against the dense oracle, plus algebraic laws."""

import numpy as np
import pytest

from autosparse import (
    DomainError,
    NormOrderError,
    ShapeError,
    SpMat,
    Span,
    ops,
)
from autosparse import csc as csc_mod

from conftest import assert_close, assert_matches_dense, dense_triplets, make_pair, random_dense


class TestAddSubtract:
    def test_add_zero_identity(self, rng):
        a, da = make_pair(rng, 10, 8, 0.3)
        assert_matches_dense(ops.add(a, SpMat.zeros(10, 8)), da)

    def test_self_cancellation_empties(self, rng):
        a, _ = make_pair(rng, 10, 8, 0.3)
        out = ops.subtract(a, a)
        assert out.nnz == 0

    def test_random_vs_dense(self, rng):
        for _ in range(30):
            r, c = int(rng.integers(1, 50)), int(rng.integers(1, 50))
            a, da = make_pair(rng, r, c, 0.2)
            b, db = make_pair(rng, r, c, 0.2)
            assert_matches_dense(ops.add(a, b), da + db)
            assert_matches_dense(ops.subtract(a, b), da - db)

    def test_shape_mismatch(self, rng):
        a, _ = make_pair(rng, 3, 4, 0.5)
        b, _ = make_pair(rng, 4, 3, 0.5)
        with pytest.raises(ShapeError):
            ops.add(a, b)

    def test_operator_sugar(self, rng):
        a, da = make_pair(rng, 6, 6, 0.4)
        b, db = make_pair(rng, 6, 6, 0.4)
        assert_matches_dense(a + b, da + db)
        assert_matches_dense(a - b, da - db)


class TestScalarMul:
    def test_unit(self, rng):
        a, da = make_pair(rng, 9, 9, 0.3)
        assert_matches_dense(ops.scalar_mul(a, 1.0), da)

    def test_zero_empties(self, rng):
        a, _ = make_pair(rng, 9, 9, 0.3)
        assert ops.scalar_mul(a, 0.0).nnz == 0

    def test_half_vs_dense(self, rng):
        a, da = make_pair(rng, 9, 9, 0.3)
        assert_matches_dense(ops.scalar_mul(a, 0.5), 0.5 * da)
        assert_matches_dense(0.5 * a, 0.5 * da)

    def test_nonfinite_propagates(self, rng):
        a, _ = make_pair(rng, 4, 4, 0.5)
        out = ops.scalar_mul(a, np.inf)
        assert np.isinf(out.csc().values).all()


class TestSpmv:
    def test_identity(self, rng):
        v = rng.random(7)
        assert np.allclose(ops.vec_times_mat(v, ops.speye(7, 7)), v)
        assert np.allclose(ops.mat_times_vec(ops.speye(7, 7), v), v)

    def test_empty_matrix_gives_zero(self, rng):
        v = rng.random(7)
        assert (ops.vec_times_mat(v, SpMat.zeros(7, 5)) == 0).all()

    def test_random_vs_dense(self, rng):
        for _ in range(20):
            r, c = int(rng.integers(1, 40)), int(rng.integers(1, 40))
            a, da = make_pair(rng, r, c, 0.2)
            v = rng.random(r)
            x = rng.random(c)
            got = ops.vec_times_mat(v, a)
            want = v @ da
            assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(1.0, np.abs(want)))
            got = ops.mat_times_vec(a, x)
            want = da @ x
            assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(1.0, np.abs(want)))

    def test_large_against_dense(self, rng):
        a, da = make_pair(rng, 1000, 1000, 0.01)
        v = rng.random(1000)
        got = ops.vec_times_mat(v, a)
        want = v @ da
        assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(1.0, np.abs(want)))

    def test_dimension_mismatch(self, rng):
        a, _ = make_pair(rng, 3, 5, 0.5)
        with pytest.raises(ShapeError):
            ops.vec_times_mat(np.ones(5), a)
        with pytest.raises(ShapeError):
            ops.mat_times_vec(a, np.ones(3))

    def test_matmul_operator_with_vector(self, rng):
        a, da = make_pair(rng, 6, 4, 0.5)
        v = rng.random(6)
        x = rng.random(4)
        assert np.allclose(v @ a, v @ da)
        assert np.allclose(a @ x, da @ x)


class TestMatmul:
    def test_identity_both_sides(self, rng):
        a, da = make_pair(rng, 8, 8, 0.3)
        assert_matches_dense(ops.matmul(ops.speye(8, 8), a), da)
        assert_matches_dense(ops.matmul(a, ops.speye(8, 8)), da)

    def test_permutation_reorders_columns(self, rng):
        perm = rng.permutation(6)
        p = SpMat.from_triplets(6, 6, [(int(perm[j]), j, 1.0) for j in range(6)])
        a, da = make_pair(rng, 6, 6, 0.4)
        assert_matches_dense(ops.matmul(a, p), da @ p.to_dense())

    def test_random_vs_dense(self, rng):
        for _ in range(25):
            m, k, n = (int(rng.integers(1, 50)) for _ in range(3))
            a, da = make_pair(rng, m, k, 0.2)
            b, db = make_pair(rng, k, n, 0.2)
            assert_matches_dense(ops.matmul(a, b), da @ db)

    def test_disjoint_outer_products_exact_nnz(self):
        # (e2 otimes e5^T) and (e3 otimes e7^T): column-disjoint supports
        a = SpMat.from_triplets(10, 10, [(2, 5, 1.0), (3, 7, 1.0)])
        b = SpMat.from_triplets(10, 10, [(5, 0, 2.0), (7, 1, 3.0)])
        out = ops.matmul(a, b)
        assert out.nnz == 2
        assert out.get(2, 0) == 2.0
        assert out.get(3, 1) == 3.0

    def test_shape_mismatch(self, rng):
        a, _ = make_pair(rng, 3, 4, 0.5)
        with pytest.raises(ShapeError):
            ops.matmul(a, a)


class TestTranspose:
    def test_involution(self, rng):
        a, da = make_pair(rng, 9, 5, 0.3)
        assert_matches_dense(ops.transpose(ops.transpose(a)), da)

    def test_diagonal_fixed_point(self):
        d = SpMat.from_triplets(5, 5, [(i, i, float(i + 1)) for i in range(5)])
        assert_matches_dense(ops.transpose(d), d.to_dense())

    def test_random_vs_dense(self, rng):
        for _ in range(25):
            r, c = int(rng.integers(1, 50)), int(rng.integers(1, 50))
            a, da = make_pair(rng, r, c, 0.25)
            assert_matches_dense(ops.transpose(a), da.T)


class TestKron:
    def test_identity_block_diag(self, rng):
        a, da = make_pair(rng, 4, 4, 0.5)
        out = ops.kron(ops.speye(2, 2), a)
        assert_matches_dense(out, np.kron(np.eye(2), da))

    def test_one_by_one_is_scaling(self, rng):
        a, da = make_pair(rng, 5, 5, 0.4)
        k = SpMat.from_triplets(1, 1, [(0, 0, 2.5)])
        assert_matches_dense(ops.kron(a, k), 2.5 * da)

    def test_random_vs_dense(self, rng):
        for _ in range(15):
            a, da = make_pair(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)), 0.4)
            b, db = make_pair(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)), 0.4)
            assert_matches_dense(ops.kron(a, b), np.kron(da, db))


class TestRepmat:
    def test_single_copy(self, rng):
        a, da = make_pair(rng, 5, 7, 0.3)
        assert_matches_dense(ops.repmat(a, 1, 1), da)

    def test_empty_tiles(self):
        out = ops.repmat(SpMat.zeros(3, 2), 2, 3)
        assert out.shape == (6, 6)
        assert out.nnz == 0

    def test_tiling_vs_dense(self, rng):
        a, da = make_pair(rng, 4, 3, 0.5)
        assert_matches_dense(ops.repmat(a, 2, 2), np.tile(da, (2, 2)))
        assert ops.repmat(a, 2, 2).nnz == 4 * a.nnz

    def test_zero_reps_rejected(self, rng):
        a, _ = make_pair(rng, 2, 2, 0.5)
        with pytest.raises(ShapeError):
            ops.repmat(a, 0, 1)


class TestReductions:
    def test_sum_identity_columns(self):
        assert ops.sum_dim(ops.speye(3, 3), 0).tolist() == [1.0, 1.0, 1.0]

    def test_min_includes_implicit_zero(self):
        m = SpMat.from_triplets(3, 2, [(0, 0, 5.0), (1, 0, 2.0)])
        # column 0 holds positives plus one implicit zero; column 1 is empty
        assert ops.min_dim(m, 0).tolist() == [0.0, 0.0]

    def test_fully_dense_column_ignores_zero(self):
        m = SpMat.from_triplets(2, 1, [(0, 0, 5.0), (1, 0, 2.0)])
        assert ops.min_dim(m, 0).tolist() == [2.0]

    def test_random_vs_dense_all_kinds(self, rng):
        for _ in range(25):
            r, c = int(rng.integers(1, 30)), int(rng.integers(1, 30))
            a, da = make_pair(rng, r, c, 0.3)
            for dim, axis in ((0, 0), (1, 1)):
                want = da.sum(axis=axis)
                got = ops.sum_dim(a, dim)
                assert np.all(np.abs(got - want) <= 1e-12 * np.maximum(1.0, np.abs(want)))
                assert np.array_equal(ops.min_dim(a, dim), da.min(axis=axis))
                assert np.array_equal(ops.max_dim(a, dim), da.max(axis=axis))

    def test_zero_length_dimension_rejected(self):
        with pytest.raises(ShapeError):
            ops.sum_dim(SpMat.zeros(0, 3), 0)
        with pytest.raises(ShapeError):
            ops.max_dim(SpMat.zeros(3, 0), 1)


class TestTrace:
    def test_identity(self):
        assert ops.trace(ops.speye(6, 6)) == 6.0

    def test_empty(self):
        assert ops.trace(SpMat.zeros(4, 4)) == 0.0

    def test_rectangular_and_random(self, rng):
        for _ in range(20):
            r, c = int(rng.integers(1, 30)), int(rng.integers(1, 30))
            a, da = make_pair(rng, r, c, 0.4)
            assert_close(ops.trace(a), float(np.trace(da)))


class TestNorms:
    def test_three_four_five(self):
        v = SpMat.from_triplets(1, 2, [(0, 0, 3.0), (0, 1, 4.0)])
        assert_close(ops.norm(v, 2), 5.0)

    def test_vector_inf(self):
        v = SpMat.from_triplets(3, 1, [(0, 0, -7.0), (2, 0, 4.0)])
        assert ops.norm(v, "inf") == 7.0
        assert ops.norm(v, np.inf) == 7.0

    def test_matrix_norms_vs_dense(self, rng):
        for _ in range(15):
            a, da = make_pair(rng, int(rng.integers(2, 30)), int(rng.integers(2, 30)), 0.3)
            assert_close(ops.norm(a, "fro"), float(np.linalg.norm(da, "fro")))
            assert_close(ops.norm(a, 1), float(np.linalg.norm(da, 1)))
            assert_close(ops.norm(a, "inf"), float(np.linalg.norm(da, np.inf)))

    def test_matrix_two_norm_unsupported(self, rng):
        a, _ = make_pair(rng, 4, 4, 0.5)
        with pytest.raises(NormOrderError):
            ops.norm(a, 2)

    def test_vector_fractional_p_rejected(self):
        v = SpMat.from_triplets(1, 3, [(0, 0, 1.0)])
        with pytest.raises(NormOrderError):
            ops.norm(v, 0.5)


class TestNormalise:
    def test_unit_column_unchanged(self):
        m = SpMat.from_triplets(2, 2, [(0, 0, 0.6), (1, 0, 0.8), (0, 1, 2.0)])
        out = ops.normalise(m, 2, 0)
        assert abs(out.get(0, 0) - 0.6) <= 1e-15
        assert abs(out.get(1, 0) - 0.8) <= 1e-15
        assert abs(out.get(0, 1) - 1.0) <= 1e-15

    def test_zero_slices_untouched(self):
        m = SpMat.from_triplets(3, 3, [(0, 0, 2.0)])
        out = ops.normalise(m, 2, 0)
        assert out.nnz == 1
        assert out.get(0, 0) == 1.0

    def test_columns_and_rows_vs_dense(self, rng):
        for dim, axis in ((0, 0), (1, 1)):
            a, da = make_pair(rng, 12, 9, 0.4)
            norms = np.linalg.norm(da, axis=axis, keepdims=True)
            norms[norms == 0] = 1.0
            assert_matches_dense(ops.normalise(a, 2, dim), da / norms)


class TestSubmat:
    def test_full_span_identity(self, rng):
        a, da = make_pair(rng, 8, 6, 0.4)
        assert_matches_dense(ops.submat(a, (0, 7), (0, 5)), da)

    def test_window_vs_dense(self, rng):
        for _ in range(20):
            a, da = make_pair(rng, 15, 12, 0.3)
            r0 = int(rng.integers(0, 10))
            r1 = int(rng.integers(r0, 15))
            c0 = int(rng.integers(0, 8))
            c1 = int(rng.integers(c0, 12))
            assert_matches_dense(
                ops.submat(a, Span(r0, r1), Span(c0, c1)), da[r0 : r1 + 1, c0 : c1 + 1]
            )

    def test_assign_then_extract_roundtrip(self, rng):
        a, da = make_pair(rng, 10, 10, 0.3)
        src, dsrc = make_pair(rng, 3, 4, 0.6)
        ops.set_submat(a, Span(2, 4), Span(5, 8), src)
        da[2:5, 5:9] = dsrc
        assert_matches_dense(a, da)
        got = ops.submat(a, Span(2, 4), Span(5, 8))
        assert got.csc().same_elements(src.csc())

    def test_assign_clears_absent_elements(self):
        a = SpMat.from_triplets(4, 4, [(1, 1, 9.0), (2, 2, 8.0)])
        ops.set_submat(a, Span(1, 2), Span(1, 2), SpMat.zeros(2, 2))
        assert a.nnz == 0

    def test_span_errors(self, rng):
        a, _ = make_pair(rng, 5, 5, 0.4)
        with pytest.raises(ShapeError):
            ops.submat(a, (0, 5), (0, 2))
        with pytest.raises(ShapeError):
            ops.set_submat(a, (0, 1), (0, 1), SpMat.zeros(3, 3))


class TestDiag:
    def test_identity_main_diag(self):
        assert ops.diag(ops.speye(3, 3), 0).tolist() == [1.0, 1.0, 1.0]

    def test_super_diag_length(self, rng):
        a, _ = make_pair(rng, 3, 3, 0.5)
        assert ops.diag(a, 1).shape[0] == 2
        assert ops.diag(a, -2).shape[0] == 1

    def test_extract_vs_dense(self, rng):
        for _ in range(20):
            a, da = make_pair(rng, 8, 11, 0.4)
            for k in range(-7, 10):
                assert np.array_equal(ops.diag(a, k), np.diag(da, k))

    def test_assign_roundtrip_with_zero_erase(self, rng):
        a, da = make_pair(rng, 7, 7, 0.4)
        v = rng.random(5)
        v[2] = 0.0
        ops.set_diag(a, 2, v)
        np.fill_diagonal(da[:, 2:], v)
        assert_matches_dense(a, da)
        assert np.array_equal(ops.diag(a, 2), v)

    def test_offset_out_of_range(self, rng):
        a, _ = make_pair(rng, 3, 3, 0.5)
        with pytest.raises(ShapeError):
            ops.diag(a, 3)
        with pytest.raises(ShapeError):
            ops.set_diag(a, -3, np.ones(1))

    def test_length_mismatch(self, rng):
        a, _ = make_pair(rng, 3, 3, 0.5)
        with pytest.raises(ShapeError):
            ops.set_diag(a, 0, np.ones(2))


class TestGenerators:
    def test_speye(self):
        m = ops.speye(3, 3)
        assert m.nnz == 3
        assert ops.trace(m) == 3.0
        m = ops.speye(2, 5)
        assert m.nnz == 2

    def test_sprandu_zero_density(self):
        assert ops.sprandu(100, 100, 0.0).nnz == 0

    def test_sprandu_exact_count_range_and_determinism(self):
        m1 = ops.sprandu(1000, 1000, 0.01, seed=5)
        m2 = ops.sprandu(1000, 1000, 0.01, seed=5)
        m3 = ops.sprandu(1000, 1000, 0.01, seed=6)
        assert m1.nnz == 10_000
        vals = m1.csc().values
        assert ((vals > 0.0) & (vals < 1.0)).all()
        assert m1.csc().same_elements(m2.csc())
        assert not m1.csc().same_elements(m3.csc())

    def test_sprandu_density_domain(self):
        with pytest.raises(DomainError):
            ops.sprandu(10, 10, 1.5)
        with pytest.raises(DomainError):
            ops.sprandu(10, 10, -0.1)

    def test_sprandu_dense_end(self):
        m = ops.sprandu(12, 12, 1.0, seed=1)
        assert m.nnz == 144


class TestAlgebraicLaws:
    def test_laws_on_random_instances(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 25))
            a, da = make_pair(rng, n, n, 0.3)
            b, db = make_pair(rng, n, n, 0.3)
            c, dc = make_pair(rng, n, n, 0.3)
            k = float(rng.uniform(-2, 2))
            left = ops.add(ops.add(a, b), c).to_dense()
            right = ops.add(a, ops.add(b, c)).to_dense()
            assert np.all(np.abs(left - right) <= 1e-12 * np.maximum(1.0, np.abs(right)))
            left = ops.scalar_mul(ops.add(a, b), k).to_dense()
            right = ops.add(ops.scalar_mul(a, k), ops.scalar_mul(b, k)).to_dense()
            assert np.all(np.abs(left - right) <= 1e-12 * np.maximum(1.0, np.abs(right)))
            left = ops.transpose(ops.matmul(a, b)).to_dense()
            right = ops.matmul(ops.transpose(b), ops.transpose(a)).to_dense()
            assert np.all(np.abs(left - right) <= 1e-12 * np.maximum(1.0, np.abs(right)))
            assert_close(ops.trace(ops.add(a, b)), ops.trace(a) + ops.trace(b))

    def test_all_results_canonical(self, rng):
        a, _ = make_pair(rng, 10, 10, 0.3)
        b, _ = make_pair(rng, 10, 10, 0.3)
        for out in (
            ops.add(a, b),
            ops.subtract(a, b),
            ops.scalar_mul(a, -1.5),
            ops.matmul(a, b),
            ops.transpose(a),
            ops.kron(a, b),
            ops.repmat(a, 2, 2),
            ops.normalise(a, 2, 0),
        ):
            csc_mod.validate(out.csc())
