import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stereo_lab.cost_volume import build_correlation, disparity_view, featurize, retrieve_local
from stereo_lab.errors import PreconditionError
from stereo_lab.synth import planted_shift_pair


def naive_retrieve(cost, disp, radius):
    """Direct triple loop over pixels and window offsets (integer disparities)."""
    h, w, w2 = cost.shape
    out = np.empty((h, w, 2 * radius + 1))
    for i in range(h):
        for j in range(w):
            for k in range(-radius, radius + 1):
                col = min(max(j - int(disp[i, j]) + k, 0), w2 - 1)
                out[i, j, k + radius] = cost[i, j, col]
    return out


def interp_oracle(cost, disp, radius):
    """Per-sample linear interpolation written out with scalars."""
    h, w, w2 = cost.shape
    out = np.empty((h, w, 2 * radius + 1))
    for i in range(h):
        for j in range(w):
            for k in range(-radius, radius + 1):
                x = min(max(j - disp[i, j] + k, 0.0), w2 - 1.0)
                x0 = int(np.floor(x))
                x1 = min(x0 + 1, w2 - 1)
                t = x - x0
                out[i, j, k + radius] = (1 - t) * cost[i, j, x0] + t * cost[i, j, x1]
    return out


def test_zero_disparity_window():
    rng = np.random.default_rng(0)
    c = rng.normal(size=(3, 6, 6))
    s = retrieve_local(c, np.zeros((3, 6)), 1)
    for w in range(1, 5):
        np.testing.assert_array_equal(s[:, w], c[:, w, w - 1:w + 2])


def test_half_pixel_disparity_is_mean():
    rng = np.random.default_rng(1)
    c = rng.normal(size=(2, 8, 8))
    d = np.full((2, 8), 0.5)
    s = retrieve_local(c, d, 2)
    for w in range(1, 8):
        assert s[0, w, 2] == pytest.approx(0.5 * (c[0, w, w] + c[0, w, w - 1]))


def test_integer_retrieval_matches_loop():
    rng = np.random.default_rng(2)
    for _ in range(20):
        c = rng.normal(size=(4, 12, 12))
        d = rng.integers(-3, 16, size=(4, 12)).astype(float)
        np.testing.assert_array_equal(retrieve_local(c, d, 3), naive_retrieve(c, d, 3))


def test_fractional_retrieval_matches_oracle():
    rng = np.random.default_rng(3)
    c = rng.normal(size=(3, 10, 10))
    d = rng.uniform(-2, 12, size=(3, 10))
    np.testing.assert_allclose(retrieve_local(c, d, 2), interp_oracle(c, d, 2), atol=1e-12)


def test_retrieval_is_linear():
    rng = np.random.default_rng(4)
    c1, c2 = rng.normal(size=(2, 5, 16, 16))
    d = rng.uniform(0, 8, size=(5, 16))
    lhs = retrieve_local(2.5 * c1 - 0.75 * c2, d, 4)
    rhs = 2.5 * retrieve_local(c1, d, 4) - 0.75 * retrieve_local(c2, d, 4)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_integer_shift_moves_window(m):
    rng = np.random.default_rng(5)
    c = rng.normal(size=(3, 40, 40))
    d = rng.integers(5, 10, size=(3, 40)).astype(float)
    radius = 2
    s0 = retrieve_local(c, d, radius)
    s1 = retrieve_local(c, d + m, radius)
    # D + m reads m columns further left: channel k of s1 is channel k - m... of a wider window
    wide = retrieve_local(c, d, radius + m)
    interior = slice(20, 38)
    np.testing.assert_array_equal(s1[:, interior], wide[:, interior, :2 * radius + 1])
    np.testing.assert_array_equal(s0[:, interior], wide[:, interior, m:m + 2 * radius + 1])


def test_retrieval_rejects_invalid_disparity():
    c = np.zeros((2, 4, 4))
    with pytest.raises(PreconditionError):
        retrieve_local(c, np.full((2, 4), np.nan), 1)
    with pytest.raises(PreconditionError):
        retrieve_local(c, np.zeros((2, 4)), 0)


def test_disparity_view_indexing():
    rng = np.random.default_rng(6)
    c = rng.normal(size=(2, 9, 9))
    v = disparity_view(c, 4)
    for w in range(4, 9):
        for d in range(5):
            assert v[1, w, d] == c[1, w, w - d]


def test_featurize_unit_norm():
    rng = np.random.default_rng(7)
    img = rng.random((12, 15, 3))
    for method in ("census", "zncc", "raw"):
        f = featurize(img, method, 5)
        np.testing.assert_allclose(np.linalg.norm(f, axis=-1), 1.0, atol=1e-12)


def test_featurize_config_errors():
    img = np.zeros((5, 5))
    with pytest.raises(PreconditionError):
        featurize(img, "census", 4)
    with pytest.raises(PreconditionError):
        featurize(img, "zncc", 1)
    with pytest.raises(PreconditionError):
        featurize(img, "sobel", 3)


def test_zncc_constant_image_is_zero():
    f = featurize(np.full((6, 7), 3.0), "zncc", 3)
    assert np.all(f == 0)
    assert np.all(build_correlation(f, f) == 0)


def test_census_step_edge():
    img = np.zeros((7, 10))
    img[:, 5:] = 1.0
    f = featurize(img, "census", 3)
    assert not np.array_equal(f[3, 4], f[3, 5])
    np.testing.assert_array_equal(f[3, 1], f[3, 2])


@settings(max_examples=30, deadline=None)
@given(arrays(np.int64, (8, 9), elements=st.integers(0, 255)), st.integers(-100, 100))
def test_offset_invariance(img, offset):
    img = img.astype(np.float64)
    for method in ("census", "zncc"):
        np.testing.assert_allclose(featurize(img + offset, method, 3), featurize(img, method, 3),
                                   atol=1e-12)


def test_correlation_is_inner_product():
    rng = np.random.default_rng(8)
    xl, xr = rng.normal(size=(2, 3, 5, 4))
    c = build_correlation(xl, xr)
    for h in range(3):
        for w in range(5):
            for w2 in range(5):
                assert c[h, w, w2] == pytest.approx(sum(xl[h, w, j] * xr[h, w2, j] for j in range(4)))


def test_self_correlation_peaks_on_diagonal():
    rng = np.random.default_rng(9)
    f = featurize(rng.random((6, 20)), "census", 5)
    c = build_correlation(f, f)
    diag = np.einsum("hww->hw", c)
    np.testing.assert_allclose(diag, 1.0)
    np.testing.assert_allclose(c.max(axis=2), diag)


def test_orthogonal_features_give_zero():
    xl = np.zeros((2, 3, 4))
    xr = np.zeros((2, 3, 4))
    xl[..., 0] = 1.0
    xr[..., 1] = 1.0
    assert np.all(build_correlation(xl, xr) == 0)


def test_correlation_bounded_and_shape_checked():
    rng = np.random.default_rng(10)
    f1 = featurize(rng.random((8, 12, 3)), "zncc", 3)
    f2 = featurize(rng.random((8, 12, 3)), "zncc", 3)
    c = build_correlation(f1, f2)
    assert c.min() >= -1 - 1e-12 and c.max() <= 1 + 1e-12
    with pytest.raises(PreconditionError):
        build_correlation(f1, f2[:, :-1])


@pytest.mark.parametrize("shift", [3, 6])
def test_small_planted_shift(shift):
    rng = np.random.default_rng(shift)
    left, right = planted_shift_pair(rng, 16, 48, shift)
    c = build_correlation(featurize(left), featurize(right))
    disp = np.arange(48)[None, :] - np.argmax(c, axis=2)
    interior = disp[2:-2, shift + 2:-2]
    assert np.mean(interior == shift) >= 0.9
