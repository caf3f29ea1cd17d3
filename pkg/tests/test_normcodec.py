import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from corpus import random_matrices, scale_relative_error
from pixnorm.dataset import Dataset
from pixnorm.errors import EmptyDataset, IntervalMismatch
from pixnorm.imageio import GrayImage
from pixnorm.normcodec import (
    Mode,
    NormMatrix,
    NormParams,
    denormalize,
    dequantize,
    normalize,
    quantize,
    read_sidecar,
    write_sidecar,
)


def as_dataset(values):
    values = np.asarray(values, dtype=np.float64)
    return Dataset(values, np.zeros(len(values)), tuple(f"c{j}" for j in range(values.shape[1])))


finite_matrix = arrays(
    np.float64,
    st.tuples(st.integers(1, 20), st.integers(1, 8)),
    elements=st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
)


def test_endpoints_and_midpoint():
    n = normalize(as_dataset([[0.0], [255.0], [510.0]]))
    assert n.values[:, 0].tolist() == [0.0, 127.5, 255.0]
    assert n.params.x_min == 0.0 and n.params.x_max == 510.0


def test_endpoints_exact_for_awkward_bounds():
    n = normalize(as_dataset([[-3.7, 0.1], [1e3 / 3, 2.9]]))
    assert n.values.min() == 0.0 and n.values.max() == 255.0
    back = denormalize(n)
    assert back.min() == -3.7 and back.max() == 1e3 / 3


def test_global_mode_uses_dataset_bounds():
    n = normalize(as_dataset([[0.0, 10.0], [4.0, 2.0]]))
    np.testing.assert_allclose(n.values, [[0.0, 255.0], [102.0, 51.0]], rtol=0, atol=1e-12)
    assert n.params.mode is Mode.GLOBAL and n.params.per_column_bounds is None


def test_per_column_mode():
    n = normalize(as_dataset([[0.0, 10.0], [4.0, 2.0]]), Mode.PER_COLUMN)
    assert n.values.tolist() == [[0.0, 255.0], [255.0, 0.0]]
    assert n.params.per_column_bounds == ((0.0, 4.0), (2.0, 10.0))


def test_constant_column_per_column_mode_maps_to_a():
    with np.errstate(all="raise"):
        n = normalize(as_dataset([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]), "per-column")
    assert n.values[:, 1].tolist() == [0.0, 0.0, 0.0]
    assert n.params.degenerate_columns == (1,)
    assert denormalize(n)[:, 1].tolist() == [5.0, 5.0, 5.0]


def test_constant_dataset_global_mode():
    n = normalize(as_dataset(np.full((4, 3), 2.5)))
    assert (n.values == 0).all()
    assert n.params.degenerate_columns == (0, 1, 2)
    assert (denormalize(n) == 2.5).all()
    assert (dequantize(quantize(n), n.params) == 2.5).all()


def test_custom_interval():
    n = normalize(as_dataset([[2.0], [4.0]]), a=-1.0, b=1.0)
    assert n.values[:, 0].tolist() == [-1.0, 1.0]
    assert denormalize(n)[:, 0].tolist() == [2.0, 4.0]
    with pytest.raises(IntervalMismatch):
        quantize(n)
    with pytest.raises(IntervalMismatch):
        dequantize(GrayImage(1, 2, [0, 255]), n.params)


def test_bad_inputs():
    with pytest.raises(EmptyDataset):
        normalize(np.empty((0, 3)))
    with pytest.raises(ValueError):
        normalize(as_dataset([[1.0]]), a=5.0, b=5.0)
    with pytest.raises(ValueError):
        NormParams(2.0, 1.0)
    with pytest.raises(ValueError):
        NormParams(0.0, 1.0, mode=Mode.PER_COLUMN, per_column_bounds=((0.0, 1.0),), cols=2)


def test_denormalize_endpoints():
    params = NormParams(-2.0, 7.0, rows=1, cols=2)
    back = denormalize(NormMatrix(np.array([[0.0, 255.0]]), params))
    assert back.tolist() == [[-2.0, 7.0]]


@pytest.mark.parametrize("value,pixel", [
    (127.5, 128), (127.49999999999999, 127), (0.0, 0), (255.0, 255), (0.5, 1), (254.5, 255),
    (0.49999999999999994, 0), (1e-300, 0),
])
def test_quantize_rounding(value, pixel):
    params = NormParams(0.0, 255.0, rows=1, cols=1)
    assert quantize(NormMatrix(np.array([[value]]), params)).pixels.tolist() == [pixel]


def test_quantize_clamps_slight_overshoot():
    params = NormParams(0.0, 1.0, rows=1, cols=2)
    img = quantize(NormMatrix(np.array([[-1e-10, 255.0 + 1e-10]]), params))
    assert img.pixels.tolist() == [0, 255]


def test_image_orientation():
    n = normalize(np.arange(12, dtype=float).reshape(4, 3))
    img = quantize(n)
    assert (img.width, img.height) == (3, 4)


def test_dequantize_endpoints():
    params = NormParams(-1.5, 3.25, rows=1, cols=2)
    assert dequantize(GrayImage(2, 1, [0, 255]), params).tolist() == [[-1.5, 3.25]]


def test_continuous_round_trip_50x10():
    d = np.random.default_rng(4).normal(3.0, 50.0, (50, 10))
    back = denormalize(normalize(d))
    np.testing.assert_allclose(back, d, rtol=1e-9, atol=0)


def test_quantized_round_trip_bound_brute_force():
    """Bound checked against explicit per-entry rounding in plain Python."""
    d = np.random.default_rng(8).uniform(-40, 90, (30, 7))
    lo, hi = d.min(), d.max()
    recon = dequantize(quantize(normalize(d)), normalize(d).params)
    for i in range(d.shape[0]):
        for j in range(d.shape[1]):
            pixel = int((d[i, j] - lo) / (hi - lo) * 255 + 0.5)
            expected = lo + pixel * (hi - lo) / 255
            assert abs(recon[i, j] - expected) < 1e-9
            assert abs(recon[i, j] - d[i, j]) <= (hi - lo) / 510 + 1e-9


def test_round_trip_corpus_sample():
    for m in random_matrices(50, seed=1):
        n = normalize(m)
        assert scale_relative_error(denormalize(n), m) <= 1e-9
        span = n.params.x_max - n.params.x_min
        err = np.abs(dequantize(quantize(n), n.params) - m).max()
        assert err <= span / 510 + 1e-9


def test_per_column_quantized_bound():
    m = np.random.default_rng(2).normal(0, 1, (60, 5)) * np.array([1, 10, 100, 1e3, 1e-3])
    n = normalize(m, Mode.PER_COLUMN)
    err = np.abs(dequantize(quantize(n), n.params) - m)
    spans = m.max(0) - m.min(0)
    assert np.all(err <= spans / 510 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(finite_matrix)
def test_range_invariant(m):
    for mode in Mode:
        n = normalize(m, mode)
        assert n.values.min() >= -1e-9 and n.values.max() <= 255 + 1e-9


@settings(max_examples=60, deadline=None)
@given(finite_matrix)
def test_order_preserved_within_columns(m):
    for mode in Mode:
        v = normalize(m, mode).values
        for j in range(m.shape[1]):
            order = np.argsort(m[:, j], kind="stable")
            assert np.all(np.diff(v[order, j]) >= 0)
    v = normalize(m).values.ravel()
    order = np.argsort(m.ravel(), kind="stable")
    assert np.all(np.diff(v[order]) >= 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(1, 6), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_modes_agree_with_shared_bounds(rows, cols, lo, span):
    m = np.random.default_rng(rows * 31 + cols).uniform(lo, lo + span, (rows + 1, cols))
    m[0, :] = lo
    m[-1, :] = lo + span
    assert np.array_equal(normalize(m, Mode.GLOBAL).values, normalize(m, Mode.PER_COLUMN).values)


def test_sidecar_round_trip(tmp_path):
    n = normalize(as_dataset([[1.0, 5.0], [2.0, 5.0]]), Mode.PER_COLUMN)
    path = tmp_path / "img.norm.json"
    write_sidecar(n.params, path)
    data = json.loads(path.read_text())
    for key in ("x_min", "x_max", "a", "b", "mode", "per_column_bounds", "rows", "cols", "degenerate_columns"):
        assert key in data
    assert data["mode"] == "per-column"
    assert read_sidecar(path) == n.params
