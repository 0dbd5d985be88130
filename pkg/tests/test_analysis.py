import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stereo_lab import analysis
from stereo_lab.analysis import (
    l1_cost_volume,
    laplacian_energy,
    lowpass,
    make_toy_pair,
    retrieval_error,
    spectrum_1d,
    sparse_gt_disparity,
    toy_study,
)
from stereo_lab.errors import PreconditionError

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


def test_toy_defaults_layout():
    left, right, gt = make_toy_pair()
    assert left.shape == right.shape == (40, 40, 3)
    assert set(np.unique(gt)) == {6.0, 15.0}
    fg = gt == 15.0
    rows, cols = np.nonzero(fg)
    assert fg.sum() == 15 * 15
    assert rows.max() - rows.min() == 14 and cols.max() - cols.min() == 14
    # vertically centred
    assert rows.min() == 12
    assert left.min() >= 0 and left.max() <= 1


def test_toy_right_view_is_shifted():
    left, right, gt = make_toy_pair()
    fg_rows, fg_cols = np.nonzero(gt == 15.0)
    np.testing.assert_array_equal(left[fg_rows, fg_cols], right[fg_rows, fg_cols - 15])
    # background rows clear of the square shift by d_bg wherever the match is in frame
    np.testing.assert_allclose(left[:12, 6:], right[:12, :-6], atol=1e-12)
    np.testing.assert_allclose(left[27:, 6:], right[27:, :-6], atol=1e-12)


def test_toy_identity_pair():
    left, right, gt = make_toy_pair(d_bg=0, d_fg=0)
    np.testing.assert_array_equal(left, right)
    assert np.all(gt == 0)


def test_toy_rejects_out_of_frame_and_bad_order():
    with pytest.raises(PreconditionError):
        make_toy_pair(size=20, fg_size=15, d_fg=15)
    with pytest.raises(PreconditionError):
        make_toy_pair(d_bg=10, d_fg=5)
    with pytest.raises(PreconditionError):
        make_toy_pair(size=10, fg_size=10)


def test_l1_identity_peaks_on_diagonal():
    img = np.random.default_rng(0).random((5, 9, 3))
    c = l1_cost_volume(img, img)
    diag = np.einsum("hww->hw", c)
    assert np.all(diag == 0)
    np.testing.assert_array_equal(c.max(axis=2), diag)


def test_l1_constant_images():
    a = np.full((3, 4, 3), 0.2)
    b = np.full((3, 4, 3), 0.7)
    np.testing.assert_allclose(l1_cost_volume(a, b), -1.5)


def test_l1_toy_background_argmax():
    left, right, gt = make_toy_pair()
    c = l1_cost_volume(left, right)
    disp = np.arange(40)[None, :] - np.argmax(c, axis=2)
    # rows above the square only see the background ramp
    np.testing.assert_array_equal(disp[1:11, 7:-1], 6)


def test_sparse_gt_columns():
    gt = np.full((4, 40), 3.0)
    np.testing.assert_array_equal(sparse_gt_disparity(gt, 1), gt)
    s = sparse_gt_disparity(gt, 6)
    assert np.count_nonzero(s.any(axis=0)) == 7
    assert np.flatnonzero(sparse_gt_disparity(gt, 50).any(axis=0)).tolist() == [0]


def test_laplacian_constant_and_ramp():
    assert laplacian_energy(np.full((6, 7, 3), 4.2)) == 0.0
    r, c = np.mgrid[0:8, 0:9]
    ramp = np.stack([2.0 * r - c, 0.5 * c + 3, r], axis=-1)
    assert laplacian_energy(ramp) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("shape", [(7, 7), (9, 12)])
def test_laplacian_impulse(shape):
    h, w = shape
    field = np.zeros(shape)
    field[3, 4] = 1.0
    assert laplacian_energy(field) == pytest.approx(8.0 / ((h - 2) * (w - 2)))


def test_laplacian_channels_averaged():
    a = np.zeros((7, 7, 2))
    a[3, 3, 0] = 1.0
    assert laplacian_energy(a) == pytest.approx(0.5 * laplacian_energy(a[..., 0]))


def test_spectrum_constant_and_nyquist():
    s = spectrum_1d(np.full(8, 2.0))
    assert s[0] == pytest.approx(16.0) and np.allclose(s[1:], 0)
    s = spectrum_1d(np.array([1.0, -1.0] * 4))
    assert np.allclose(np.delete(s, 4), 0) and s[4] == pytest.approx(8.0)


@settings(max_examples=50)
@given(arrays(np.float64, st.integers(2, 64), elements=finite))
def test_parseval(x):
    mag = spectrum_1d(x)
    lhs = np.sum(x ** 2)
    rhs = np.sum(mag ** 2) / x.size
    assert abs(lhs - rhs) <= 1e-9 * max(lhs, 1e-300) + 1e-12


def test_spectrum_rejects_short():
    with pytest.raises(PreconditionError):
        spectrum_1d(np.array([1.0]))


def test_lowpass_constant_and_impulse():
    np.testing.assert_allclose(lowpass(np.full(11, 3.0), 2), 3.0)
    x = np.zeros(11)
    x[5] = 1.0
    y = lowpass(x, 2)
    np.testing.assert_allclose(y[3:8], 0.2)
    assert np.all(y[:3] == 0) and np.all(y[8:] == 0)


@settings(max_examples=50)
@given(arrays(np.float64, (6, 20, 3), elements=finite), finite, st.integers(1, 4))
def test_lowpass_unit_dc_gain(x, c, r):
    np.testing.assert_allclose(lowpass(x + c, r) - lowpass(x, r), c, atol=1e-9)


def test_lowpass_axis_is_columns():
    x = np.zeros((5, 9))
    x[2, 4] = 1.0
    y = lowpass(x, 1)
    assert np.count_nonzero(y) == 3 and np.all(y[2, 3:6] > 0)


def test_lowpass_rejects_radius_zero():
    with pytest.raises(PreconditionError):
        lowpass(np.zeros(4), 0)


def test_retrieval_error_norm():
    rng = np.random.default_rng(5)
    a, b = rng.normal(size=(2, 4, 5, 3))
    assert retrieval_error(a, a) == 0.0
    assert retrieval_error(a, b) == pytest.approx(np.linalg.norm((a - b).ravel()))
    c = np.full(a.shape, 0.3)
    assert retrieval_error(a + c, b) <= retrieval_error(a, b) + np.linalg.norm(c.ravel()) + 1e-12
    with pytest.raises(PreconditionError):
        retrieval_error(a, b[:, :-1])


@pytest.fixture(scope="module")
def study():
    return toy_study()


def test_toy_study_orderings(study):
    lap, err, low = study.laplacian, study.error, study.error_lowpass
    assert lap["sparse"] > lap["full"]
    assert lap["filled"] < lap["sparse"]
    assert err["full"] == 0.0
    assert err["zero"] > err["filled"]
    assert err["filled"] < err["sparse"]
    assert low["filled"] < low["sparse"]


def test_toy_study_contents(study):
    assert set(study.slabs) == set(analysis.INITS)
    for s in study.slabs.values():
        assert s.shape == (40, 40, 9)
    for name, mag in study.spectra.items():
        line = study.slabs[name][20, :, 4]
        assert np.sum(line ** 2) == pytest.approx(np.sum(mag ** 2) / line.size, rel=1e-9)


def test_toy_study_accepts_main_text_background_disparity():
    s = toy_study(d_bg=5)
    assert s.laplacian["sparse"] > s.laplacian["full"]
