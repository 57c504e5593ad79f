import numpy as np
import pytest
from oracles import brute_kernel, dense_dual, dense_ridge

from ltcf import cfilter
from ltcf.spectral import dft2, gaussian_labels, idft2, shift_to_origin


def origin_labels(rows, cols, sigma=1.0):
    return shift_to_origin(gaussian_labels(rows, cols, sigma))


def test_linear_filter_matches_dense_ridge():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=8), rng.normal(size=8)
    w = idft2(cfilter.train_linear(x[:, None], y[:, None], 0.5))[:, 0]
    np.testing.assert_allclose(w, dense_ridge(x, y, 0.5), atol=1e-10)


def test_linear_filter_impulse_example():
    # a unit impulse is orthonormal to its shifts, so w = y / (1 + lam)
    x = np.zeros((6, 1))
    x[0] = 1.0
    y = np.arange(6, dtype=float)[:, None]
    w = idft2(cfilter.train_linear(x, y, 1.0))
    np.testing.assert_allclose(w, y / 2.0, atol=1e-12)


def test_linear_filter_rejects_bad_input():
    with pytest.raises(ValueError):
        cfilter.train_linear(np.ones((3, 3)), np.ones((3, 3)), 0.0)
    with pytest.raises(ValueError):
        cfilter.train_linear(np.ones((3, 3)), np.ones((3, 2)), 0.1)


@pytest.mark.parametrize("normalize", [False, True])
def test_kernel_matches_brute_force(normalize):
    rng = np.random.default_rng(4)
    x, x2 = rng.normal(size=(5, 6, 3)), rng.normal(size=(5, 6, 3))
    np.testing.assert_allclose(
        cfilter.kernel_correlation(x, x2, 3.0, normalize), brute_kernel(x, x2, 3.0, normalize), atol=1e-12
    )


def test_kernel_self_peak_is_one():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 6))
    k = cfilter.kernel_correlation(x, x, 1.0)
    assert k[0, 0] == pytest.approx(1.0)
    assert k.max() == pytest.approx(1.0)


def test_kernel_rejects_mismatch_and_sigma():
    with pytest.raises(ValueError):
        cfilter.kernel_correlation(np.ones((3, 3)), np.ones((3, 4)), 1.0)
    with pytest.raises(ValueError):
        cfilter.kernel_correlation(np.ones((3, 3)), np.ones((3, 3)), 0.0)


def test_dual_matches_dense_solve():
    rng = np.random.default_rng(6)
    x, y = rng.normal(size=(3, 4, 2)), rng.normal(size=(3, 4))
    f = cfilter.train(x, y, 0.2, 2.0, normalize_kernel=True)
    np.testing.assert_allclose(f.dual_coefficients, dense_dual(x, y, 0.2, 2.0, True), atol=1e-10)


def test_train_validates():
    x = np.ones((4, 4))
    with pytest.raises(ValueError):
        cfilter.train(x, np.ones((4, 4)), 0.0, 1.0)
    with pytest.raises(ValueError):
        cfilter.train(x, np.ones((3, 4)), 0.1, 1.0)
    with pytest.raises(ValueError):
        cfilter.train(x, np.ones((4, 4)), 0.1, 1.0, learning_rate=0.0)


def test_self_response_reproduces_labels():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(8, 8, 2))
    y = origin_labels(8, 8)
    f = cfilter.train(x, y, 1e-6, 5.0)
    r = cfilter.respond(f, x)
    assert r.shift() == (0, 0)
    np.testing.assert_allclose(r.grid, y, atol=1e-3)


def test_response_tracks_cyclic_shift():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(10, 12, 3))
    f = cfilter.train(x, origin_labels(10, 12), 1e-4, 0.5, normalize_kernel=True)
    assert cfilter.respond(f, np.roll(x, (3, -4), axis=(0, 1))).shift() == (3, -4)


def test_respond_rejects_wrong_shape():
    f = cfilter.train(np.ones((4, 4)), origin_labels(4, 4), 0.1, 1.0)
    with pytest.raises(ValueError):
        cfilter.respond(f, np.ones((4, 5)))


def test_update_moving_average():
    rng = np.random.default_rng(9)
    x1, x2 = rng.normal(size=(6, 6)), rng.normal(size=(6, 6))
    y = origin_labels(6, 6)
    f1 = cfilter.train(x1, y, 0.1, 2.0, learning_rate=0.25)
    f2 = cfilter.train(x2, y, 0.1, 2.0)
    u = cfilter.update(f1, x2)
    np.testing.assert_allclose(u.template[..., 0], 0.75 * x1 + 0.25 * x2)
    np.testing.assert_allclose(u.alpha_spectrum, 0.75 * f1.alpha_spectrum + 0.25 * f2.alpha_spectrum)


def test_update_full_rate_equals_retrain():
    rng = np.random.default_rng(10)
    x1, x2 = rng.normal(size=(5, 5)), rng.normal(size=(5, 5))
    y = origin_labels(5, 5)
    u = cfilter.update(cfilter.train(x1, y, 0.1, 2.0), x2, learning_rate=1.0)
    np.testing.assert_allclose(u.alpha_spectrum, cfilter.train(x2, y, 0.1, 2.0).alpha_spectrum)


def test_update_rejects_bad_rate_and_shape():
    f = cfilter.train(np.ones((4, 4)), origin_labels(4, 4), 0.1, 1.0)
    with pytest.raises(ValueError):
        cfilter.update(f, np.ones((4, 4)), learning_rate=1.5)
    with pytest.raises(ValueError):
        cfilter.update(f, np.ones((5, 4)))


def test_fusion_example():
    a = np.array([[1.0, 3.0], [0.0, -2.0]])
    b = np.array([[2.0, 0.0], [2.0, 0.0]])
    fused = cfilter.fuse_responses(a, b)
    np.testing.assert_allclose(fused.grid, [[0.375, 0.375], [0.25, 0.0]])
    assert fused.grid.sum() == pytest.approx(1.0)
    assert fused.peak[:2] == (0, 0)


def test_fusion_rejects_empty_map():
    with pytest.raises(ValueError):
        cfilter.fuse_responses(-np.ones((2, 2)), np.ones((2, 2)))


def test_scale_labels():
    y = cfilter.scale_labels(5, 1.0)
    assert y.argmax() == 2
    np.testing.assert_allclose(y, y[::-1])
    assert y[3] == pytest.approx(np.exp(-0.5))


class _Pyramid:
    def __init__(self, levels, scales):
        self.levels, self.scales = levels, scales


def test_scale_filter_self_match_and_shift():
    rng = np.random.default_rng(11)
    n = 9
    scales = 1.03 ** (np.arange(n) - n // 2)
    levels = np.cumsum(rng.normal(size=(n, 20)), axis=0)
    sf = cfilter.train_scale_filter(_Pyramid(levels, scales), 1e-4, 1.0, normalize_kernel=False)
    s, score, idx = cfilter.estimate_scale(sf, _Pyramid(levels, scales))
    assert (s, idx) == (1.0, n // 2)
    assert score > 0.9
    # levels moved up by one: the matching level is one step larger
    _, _, idx = cfilter.estimate_scale(sf, _Pyramid(np.roll(levels, 1, axis=0), scales))
    assert idx == n // 2 + 1


def test_scale_filter_rejects_even_levels_and_mismatch():
    with pytest.raises(ValueError):
        cfilter.train_scale_filter(_Pyramid(np.ones((4, 3)), np.ones(4)), 1e-4, 1.0)
    sf = cfilter.train_scale_filter(_Pyramid(np.ones((3, 3)), np.array([0.9, 1, 1.1])), 1e-4, 1.0)
    with pytest.raises(ValueError):
        cfilter.estimate_scale(sf, _Pyramid(np.ones((3, 4)), np.ones(3)))


def test_kernel_spectrum_is_real_for_self_correlation():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(6, 7, 2))
    spec = dft2(cfilter.kernel_correlation(x, x, 2.0))
    assert np.abs(spec.imag).max() < 1e-9
