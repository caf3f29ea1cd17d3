import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from churnlike import NUMERIC, write_churnlike_csv
from pixnorm.dataset import Dataset, compute_stats, load_csv, parse_label, synth_churn, write_csv
from pixnorm.errors import (
    EmptyAfterFilter,
    EmptyDataset,
    InvalidLabel,
    IoError,
    MissingCell,
    MissingLabelColumn,
    NonNumericCell,
    UnknownColumn,
)


def test_minimal_csv(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("a,churn\n5.0,1\n")
    d = load_csv(p)
    assert d.values.tolist() == [[5.0]]
    assert d.labels.tolist() == [1]
    assert d.col_count == 1 and d.row_count == 1


def test_non_numeric_cell_reports_row_and_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,churn\n1,2,0\n3,abc,1\n")
    with pytest.raises(NonNumericCell) as err:
        load_csv(p)
    assert err.value.row == 2 and err.value.column == "b" and err.value.value == "abc"


def test_churnlike_schema_keeps_numeric_columns(tmp_path):
    p = write_churnlike_csv(tmp_path / "churn.csv", rows=200)
    d = load_csv(p, "churn")
    assert d.row_count == 200
    assert d.col_count == 17
    assert list(d.column_names) == NUMERIC
    assert set(d.labels.tolist()) <= {0, 1}


def test_drop_columns(tmp_path):
    p = write_churnlike_csv(tmp_path / "churn.csv", rows=20)
    d = load_csv(p, drop_columns=["area code", "tenure months"])
    assert d.col_count == 15
    assert "area code" not in d.column_names
    with pytest.raises(UnknownColumn):
        load_csv(p, drop_columns=["nope"])


@pytest.mark.parametrize("text,label", [
    ("0", 0), ("1", 1), ("1.0", 1), ("true", 1), ("False", 0), ("True.", 1), (" false. ", 0),
    ("TRUE.", 1), ("yes", 1), ("No", 0), ("no.", 0),
])
def test_label_spellings(text, label):
    assert parse_label(text, 1) == label


@pytest.mark.parametrize("text", ["2", "maybe", "", "0.5", "1.."])
def test_bad_labels(text):
    with pytest.raises(InvalidLabel):
        parse_label(text, 3)


def test_error_paths(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(MissingLabelColumn):
        load_csv(p, "churn")
    p.write_text("name,churn\nbob,1\n")
    with pytest.raises(EmptyAfterFilter):
        load_csv(p)
    with pytest.raises(IoError):
        load_csv(tmp_path / "missing.csv")
    p.write_text("a,churn\n")
    with pytest.raises(EmptyDataset):
        load_csv(p)


def test_missing_cells_rejected_or_imputed(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b,churn\n1,,0\n3,4,1\n5,8,1\n")
    with pytest.raises(MissingCell) as err:
        load_csv(p)
    assert err.value.row == 1 and err.value.column == "b"
    d = load_csv(p, impute_mean=True)
    assert d.values[:, 1].tolist() == [6.0, 4.0, 8.0]


def test_label_column_case_insensitive(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("a,Churn\n1,True.\n2,False.\n")
    assert load_csv(p, "churn").labels.tolist() == [1, 0]


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 6)),
              elements=st.floats(-1e12, 1e12, allow_nan=False)),
       st.data())
def test_csv_round_trip(tmp_path_factory, values, data):
    labels = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(values), max_size=len(values))))
    d = Dataset(values, labels, tuple(f"c{j}" for j in range(values.shape[1])))
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(d, p)
    back = load_csv(p)
    assert np.array_equal(back.values, d.values)
    assert np.array_equal(back.labels, d.labels)
    assert back.column_names == d.column_names


def test_compute_stats_hand_example():
    d = Dataset(np.array([[0.0, 10.0], [4.0, 2.0]]), np.array([0, 1]), ("a", "b"))
    s = compute_stats(d)
    assert s.min.tolist() == [0.0, 2.0]
    assert s.max.tolist() == [4.0, 10.0]
    assert s.global_min == 0.0 and s.global_max == 10.0


def test_compute_stats_constant_and_single_row():
    c = 0.1
    d = Dataset(np.full((7, 3), c), np.zeros(7), ("a", "b", "c"))
    s = compute_stats(d)
    assert (s.min == c).all() and (s.max == c).all() and (s.mean == c).all()
    assert s.global_min == s.global_max == c
    s = compute_stats(Dataset(np.array([[3.0, 7.0]]), np.array([1]), ("a", "b")))
    assert s.min.tolist() == s.max.tolist() == s.mean.tolist() == [3.0, 7.0]


def test_compute_stats_empty():
    with pytest.raises(EmptyDataset):
        compute_stats(Dataset(np.empty((0, 2)), np.empty(0), ("a", "b")))


def naive_stats(values):
    rows, cols = len(values), len(values[0])
    lo, hi, mean = [], [], []
    for j in range(cols):
        mn = mx = values[0][j]
        total = 0.0
        for i in range(rows):
            v = values[i][j]
            mn = v if v < mn else mn
            mx = v if v > mx else mx
            total += v
        lo.append(mn)
        hi.append(mx)
        mean.append(total / rows)
    return lo, hi, mean


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 100), st.integers(1, 100), st.integers(0, 2**32))
def test_compute_stats_matches_double_loop(rows, cols, seed):
    values = np.random.default_rng(seed).normal(0, 100, (rows, cols))
    s = compute_stats(Dataset(values, np.zeros(rows), tuple(map(str, range(cols)))))
    lo, hi, mean = naive_stats(values.tolist())
    assert s.min.tolist() == lo and s.max.tolist() == hi
    np.testing.assert_allclose(s.mean, mean, rtol=1e-12, atol=1e-10)
    assert s.global_min == min(lo) and s.global_max == max(hi)
    assert np.all(s.min <= s.mean) and np.all(s.mean <= s.max)


def test_synth_determinism_and_balance():
    a = synth_churn(100, 17, 42, 4.0)
    b = synth_churn(100, 17, 42, 4.0)
    assert np.array_equal(a.values.view(np.uint64), b.values.view(np.uint64))
    assert np.array_equal(a.labels, b.labels)
    assert abs(int(a.labels.sum()) - (100 - int(a.labels.sum()))) <= 1
    odd = synth_churn(101, 3, 1, 1.0)
    assert abs(2 * int(odd.labels.sum()) - 101) <= 1


def test_synth_zero_separation_gap_shrinks():
    gaps = []
    for rows in (200, 20000):
        d = synth_churn(rows, 4, 3, 0.0)
        gaps.append(np.abs(d.values[d.labels == 1].mean(0) - d.values[d.labels == 0].mean(0)).max())
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.1


def centroid_accuracy(d):
    """Nearest-class-mean rule fitted and scored on the same data."""
    mu0 = d.values[d.labels == 0].mean(0)
    mu1 = d.values[d.labels == 1].mean(0)
    pred = (np.linalg.norm(d.values - mu1, axis=1) < np.linalg.norm(d.values - mu0, axis=1))
    return float(np.mean(pred.astype(int) == d.labels))


def test_synth_separable_by_centroid_rule():
    assert centroid_accuracy(synth_churn(1000, 2, 7, 6.0)) >= 0.99


def test_label_invariants():
    d = synth_churn(51, 2, 0, 1.0)
    assert set(np.unique(d.labels)) <= {0, 1}
    assert int((d.labels == 1).sum() + (d.labels == 0).sum()) == d.row_count
