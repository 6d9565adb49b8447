"""Matrix Market persistence and the text renderer."""

import io

import numpy as np
import pytest

from autosparse import (
    CorruptionError,
    DuplicateEntryError,
    MatrixMarketError,
    SpMat,
    load_mm,
    render_text,
    save_mm,
)

from conftest import dense_triplets, make_pair, random_dense


def roundtrip(m):
    buf = io.StringIO()
    save_mm(m, buf)
    return buf.getvalue()


class TestSaveFormat:
    def test_empty_matrix(self):
        text = roundtrip(SpMat.zeros(5, 5))
        lines = text.splitlines()
        assert lines[0] == "%%MatrixMarket matrix coordinate real general"
        assert lines[1] == "5 5 0"
        assert len(lines) == 2

    def test_one_based_indexing(self):
        text = roundtrip(SpMat.from_triplets(2, 2, [(0, 0, 1.5)]))
        assert text.splitlines()[2].startswith("1 1 ")

    def test_column_major_entry_order(self, rng):
        m, _ = make_pair(rng, 10, 8, 0.3)
        entries = roundtrip(m).splitlines()[2:]
        coords = [tuple(int(x) for x in line.split()[:2]) for line in entries]
        assert coords == sorted(coords, key=lambda rc: (rc[1], rc[0]))

    def test_file_path_sink(self, rng, tmp_path):
        m, dense = make_pair(rng, 6, 6, 0.4)
        path = tmp_path / "m.mtx"
        save_mm(m, path)
        again = load_mm(path)
        assert again.csc().same_elements(m.csc())


class TestRoundTrip:
    def test_exact_on_random_matrices(self, rng):
        for _ in range(100):
            r = int(rng.integers(1, 30))
            c = int(rng.integers(1, 30))
            m, _ = make_pair(rng, r, c, 0.25)
            again = load_mm(roundtrip(m))
            assert again.csc().same_elements(m.csc())  # bit-identical values

    def test_save_load_save_byte_identical(self, rng):
        for _ in range(20):
            m, _ = make_pair(rng, 12, 12, 0.3)
            first = roundtrip(m)
            second = roundtrip(load_mm(first))
            assert first == second

    def test_awkward_values_survive(self):
        vals = [1e-308, 1.0 / 3.0, np.nextafter(1.0, 2.0), 1e300, -7.25]
        m = SpMat.from_triplets(5, 1, [(i, 0, v) for i, v in enumerate(vals)])
        again = load_mm(roundtrip(m))
        assert np.array_equal(again.csc().values, m.csc().values)


class TestLoadValidation:
    GOOD = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 2.5\n"

    def test_good_input(self):
        m = load_mm(self.GOOD)
        assert m.shape == (2, 2)
        assert m.get(0, 0) == 2.5

    def test_comment_lines_allowed(self):
        text = (
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n2 2 1\n% another\n1 1 2.5\n"
        )
        assert load_mm(text).get(0, 0) == 2.5

    @pytest.mark.parametrize("field", range(5))
    def test_header_token_mutations_rejected(self, field):
        tokens = "%%MatrixMarket matrix coordinate real general".split()
        tokens[field] = tokens[field] + "x"
        bad = " ".join(tokens) + "\n2 2 0\n"
        with pytest.raises(MatrixMarketError):
            load_mm(bad)

    @pytest.mark.parametrize(
        "header",
        [
            "%%MatrixMarket matrix coordinate complex general",
            "%%MatrixMarket matrix coordinate real symmetric",
            "%%MatrixMarket matrix array real general",
            "%%MatrixMarket matrix real coordinate general",
            "%%matrixmarket matrix coordinate real general",
        ],
    )
    def test_other_flavours_rejected(self, header):
        with pytest.raises(MatrixMarketError):
            load_mm(header + "\n1 1 0\n")

    def test_error_carries_line_number(self):
        bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n"
        with pytest.raises(MatrixMarketError, match="line 3"):
            load_mm(bad)

    def test_out_of_range_entry(self):
        bad = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"
        with pytest.raises(CorruptionError):
            load_mm(bad)

    def test_entry_count_mismatch(self):
        bad = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"
        with pytest.raises(MatrixMarketError):
            load_mm(bad)

    def test_duplicates_strict_and_lenient(self):
        dup = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 2.0\n1 1 3.0\n"
        with pytest.raises(DuplicateEntryError):
            load_mm(dup)
        m = load_mm(dup, lenient_duplicates=True)
        assert m.get(0, 0) == 5.0


class TestRender:
    def test_small_grid(self):
        text = render_text(SpMat.from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 1.0)]))
        body = text.splitlines()[1:]
        cells = [cell for line in body for cell in line.split()]
        assert len(cells) == 4
        assert cells[0] == "1" and cells[3] == "1"

    def test_large_matrix_lists_triplets(self, rng):
        m, _ = make_pair(rng, 1000, 1000, 0.001)
        text = render_text(m)
        assert "(" in text
        listed = [line for line in text.splitlines()[1:] if line]
        assert len(listed) == m.nnz

    def test_listing_order_is_column_major(self, rng):
        m, _ = make_pair(rng, 40, 40, 0.05)
        text = render_text(m, max_dim=10)
        got = []
        for line in text.splitlines()[1:]:
            rc = line[line.index("(") + 1 : line.index(")")]
            r, c = (int(x) for x in rc.split(","))
            got.append((r, c))
        assert got == [(t.row, t.col) for t in m.triplets()]

    def test_threshold_boundary(self, rng):
        m, _ = make_pair(rng, 20, 20, 0.2)
        assert "(" not in render_text(m, max_dim=20)
        assert "(" in render_text(m, max_dim=19)

    def test_deterministic(self, rng):
        m, _ = make_pair(rng, 9, 9, 0.3)
        assert render_text(m) == render_text(m)
