import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustlex.contingency import (
    ContingencyTable,
    corpus_stats,
    load_long_csv,
    load_matrix_csv,
    normalize,
    top_k_filter,
    validate,
    write_matrix_csv,
)
from robustlex.errors import (
    DuplicateLabel,
    EmptyInput,
    MalformedInput,
    NegativeCount,
    RaggedRow,
    ZeroMarginal,
)


def table(counts, rows=None, cols=None):
    counts = np.asarray(counts)
    rows = rows or [f"r{i}" for i in range(counts.shape[0])]
    cols = cols or [f"c{j}" for j in range(counts.shape[1])]
    return ContingencyTable(tuple(rows), tuple(cols), counts)


def write(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadMatrix:
    def test_basic(self, tmp_path):
        t = load_matrix_csv(write(tmp_path, "w,d1,d2\na,1,2\nb,3,4\n"))
        assert t.row_labels == ("a", "b")
        assert t.col_labels == ("d1", "d2")
        assert t.counts.tolist() == [[1, 2], [3, 4]]

    def test_negative(self, tmp_path):
        with pytest.raises(NegativeCount):
            load_matrix_csv(write(tmp_path, "w,d1\na,-1\n"))

    def test_duplicate_row(self, tmp_path):
        with pytest.raises(DuplicateLabel):
            load_matrix_csv(write(tmp_path, "w,d1\na,1\na,2\n"))

    def test_duplicate_column(self, tmp_path):
        with pytest.raises(DuplicateLabel):
            load_matrix_csv(write(tmp_path, "w,d1,d1\na,1,2\n"))

    def test_ragged(self, tmp_path):
        with pytest.raises(RaggedRow):
            load_matrix_csv(write(tmp_path, "w,d1,d2\na,1\n"))

    @pytest.mark.parametrize("cell", ["1.5", "x", "", "1e3"])
    def test_non_integer(self, tmp_path, cell):
        with pytest.raises(MalformedInput):
            load_matrix_csv(write(tmp_path, f"w,d1,d2\na,1,{cell}\n"))

    def test_quoted_field_rejected(self, tmp_path):
        with pytest.raises(MalformedInput):
            load_matrix_csv(write(tmp_path, 'w,d1\n"a,b",1\n'))

    def test_empty(self, tmp_path):
        with pytest.raises(EmptyInput):
            load_matrix_csv(write(tmp_path, ""))

    def test_zero_row_is_not_rejected_at_parse(self, tmp_path):
        t = load_matrix_csv(write(tmp_path, "w,d1\na,0\n"))
        assert t.counts.tolist() == [[0]]

    def test_bom_and_crlf(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_bytes("﻿w,d1\r\na,3\r\n".encode("utf-8"))
        assert load_matrix_csv(p).counts.tolist() == [[3]]


class TestLoadLong:
    def test_accumulates(self, tmp_path):
        t = load_long_csv(write(tmp_path, "a,d1,2\na,d1,3\nb,d2,1\n"))
        assert t.row_labels == ("a", "b")
        assert t.col_labels == ("d1", "d2")
        assert t.counts.tolist() == [[5, 0], [0, 1]]

    def test_empty(self, tmp_path):
        with pytest.raises(EmptyInput):
            load_long_csv(write(tmp_path, ""))

    def test_header_only_is_empty(self, tmp_path):
        with pytest.raises(EmptyInput):
            load_long_csv(write(tmp_path, "word,doc,count\n"))

    def test_single_zero_record(self, tmp_path):
        t = load_long_csv(write(tmp_path, "a,d1,0\n"))
        assert t.counts.tolist() == [[0]]

    def test_header_skipped(self, tmp_path):
        t = load_long_csv(write(tmp_path, "word,doc,count\na,d1,4\n"))
        assert t.row_labels == ("a",)

    def test_malformed(self, tmp_path):
        with pytest.raises(MalformedInput):
            load_long_csv(write(tmp_path, "a,d1\n"))

    def test_negative(self, tmp_path):
        with pytest.raises(NegativeCount):
            load_long_csv(write(tmp_path, "a,d1,-2\n"))

    def test_round_trip_through_matrix(self, tmp_path):
        src = write(tmp_path, "b,d2,1\na,d1,2\na,d2,7\nb,d2,4\nc,d3,1\n")
        long_table = load_long_csv(src)
        dst = tmp_path / "wide.csv"
        write_matrix_csv(long_table, dst)
        assert load_matrix_csv(dst) == long_table


class TestTopK:
    def test_tie_break(self):
        t = table([[5], [9], [5]], rows=["c", "b", "a"])
        assert top_k_filter(t, 2).row_labels == ("b", "a")

    def test_k_at_least_rows_sorts(self):
        t = table([[1], [9], [5]], rows=["x", "y", "z"])
        out = top_k_filter(t, 10)
        assert out.row_labels == ("y", "z", "x")
        assert out.counts.ravel().tolist() == [9, 5, 1]
        assert out.col_labels == t.col_labels

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            top_k_filter(table([[1]]), 0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 9), min_size=3, max_size=3), min_size=1, max_size=8))
    def test_full_k_preserves_rows(self, rows):
        t = table(rows)
        out = top_k_filter(t, len(rows))
        before = sorted(zip(t.row_labels, map(tuple, t.counts.tolist())))
        after = sorted(zip(out.row_labels, map(tuple, out.counts.tolist())))
        assert before == after


class TestValidate:
    def test_ok(self):
        t = table([[1, 1], [1, 1]])
        assert validate(t) is t

    def test_zero_row(self):
        with pytest.raises(ZeroMarginal) as exc:
            validate(table([[0, 0], [1, 2]]))
        assert (exc.value.axis, exc.value.index) == ("row", 0)

    def test_zero_col(self):
        with pytest.raises(ZeroMarginal) as exc:
            validate(table([[1, 0], [2, 0]]))
        assert (exc.value.axis, exc.value.index) == ("col", 1)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            validate(ContingencyTable((), ("d",), np.zeros((0, 1), dtype=int)))


class TestNormalize:
    def test_uniform(self):
        assert np.all(normalize(table([[1, 1], [1, 1]])).values == 0.5)

    def test_diagonal(self):
        assert normalize(table([[4, 0], [0, 1]])).values.tolist() == [[1, 0], [0, 1]]

    def test_equal_margins(self):
        v = normalize(table([[2, 1], [1, 2]])).values
        assert np.allclose(v, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], atol=1e-15)

    def test_labels_preserved(self):
        t = table([[1, 2]], rows=["w"], cols=["x", "y"])
        n = normalize(t)
        assert (n.row_labels, n.col_labels) == (("w",), ("x", "y"))

    def test_rejects_zero_marginal(self):
        with pytest.raises(ZeroMarginal):
            normalize(table([[0, 1], [0, 2]]))

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.lists(st.integers(1, 50), min_size=3, max_size=3), min_size=2, max_size=5),
        st.integers(1, 1000),
    )
    def test_scale_invariant(self, rows, c):
        t = table(rows)
        scaled = table(np.asarray(rows) * c)
        assert np.allclose(normalize(t).values, normalize(scaled).values, rtol=1e-14, atol=0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 20), min_size=4, max_size=4), min_size=2, max_size=6))
    def test_value_range(self, rows):
        t = table(rows)
        if (t.row_sums() == 0).any() or (t.col_sums() == 0).any():
            return
        v = normalize(t).values
        rs, cs = t.row_sums()[:, None], t.col_sums()[None, :]
        assert np.all(v >= 0)
        assert np.all(v <= np.minimum(rs, cs) / np.sqrt(rs * cs) + 1e-15)
        assert np.array_equal(v == 0, t.counts == 0)


class TestCorpusStats:
    def test_columns(self):
        t = table([[1, 5, 3], [1, 0, 1], [0, 0, 2]], cols=["A", "B", "C"])
        s = corpus_stats(t)
        assert (s["A"].occurrences, s["A"].distinct_words, s["A"].hapax) == (2, 2, 2)
        assert (s["B"].occurrences, s["B"].distinct_words, s["B"].hapax) == (5, 1, 0)
        assert (s["C"].occurrences, s["C"].distinct_words, s["C"].hapax) == (6, 3, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=1, max_size=7))
    def test_invariants(self, rows):
        t = table(rows)
        for d in corpus_stats(t).documents:
            assert d.hapax <= d.distinct_words <= len(rows)
            assert d.occurrences >= d.distinct_words


def test_table_is_immutable():
    t = table([[1, 2]])
    with pytest.raises(ValueError):
        t.counts[0, 0] = 5
