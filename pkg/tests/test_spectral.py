import numpy as np
import pytest

from ltcf.spectral import cosine_window, dft2, gaussian_labels, idft2, shift_to_origin, unwrap_shift


def direct_dft2(a):
    # summation form of the unnormalized forward transform
    M, N = a.shape
    m = np.arange(M)
    n = np.arange(N)
    fm = np.exp(-2j * np.pi * np.outer(m, m) / M)
    fn = np.exp(-2j * np.pi * np.outer(n, n) / N)
    return fm @ a @ fn


def test_dft_matches_summation():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 7))
    np.testing.assert_allclose(dft2(a), direct_dft2(a), atol=1e-10)


def test_dft_acts_per_channel():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(4, 6, 3))
    spec = dft2(a)
    for c in range(3):
        np.testing.assert_allclose(spec[..., c], direct_dft2(a[..., c]), atol=1e-10)


def test_round_trip():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(8, 5))
    np.testing.assert_allclose(idft2(dft2(a)), a, atol=1e-12)


def test_delta_and_constant():
    delta = np.zeros((4, 4))
    delta[0, 0] = 1
    np.testing.assert_allclose(dft2(delta), np.ones((4, 4)))
    spec = dft2(np.ones((3, 5)))
    assert spec[0, 0] == pytest.approx(15)
    assert np.abs(spec).sum() == pytest.approx(15)


def test_zero_size_grid_rejected():
    with pytest.raises(ValueError):
        dft2(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        idft2(np.zeros(5))


def test_gaussian_labels_peak_and_values():
    y = gaussian_labels(5, 5, 1.0)
    assert y[2, 2] == 1.0
    assert y[2, 3] == pytest.approx(np.exp(-0.5))
    assert y[0, 0] == pytest.approx(np.exp(-4.0))
    np.testing.assert_allclose(y, y.T)


def test_gaussian_labels_even_size_peak():
    y = gaussian_labels(4, 6, 2.0)
    assert np.unravel_index(y.argmax(), y.shape) == (2, 3)


def test_gaussian_labels_bad_sigma():
    with pytest.raises(ValueError):
        gaussian_labels(4, 4, 0.0)


def test_shift_to_origin():
    y = shift_to_origin(gaussian_labels(7, 6, 1.5))
    assert np.unravel_index(y.argmax(), y.shape) == (0, 0)


def test_cosine_window():
    w = cosine_window(6, 1)
    assert w.shape == (6, 1)
    assert w[0, 0] == 0
    assert cosine_window(1, 1)[0, 0] == 1
    np.testing.assert_allclose(cosine_window(5, 5), cosine_window(5, 5).T)
    with pytest.raises(ValueError):
        cosine_window(0, 3)


@pytest.mark.parametrize("index,size,expected", [(0, 8, 0), (3, 8, 3), (4, 8, 4), (5, 8, -3), (7, 8, -1), (3, 7, 3), (4, 7, -3)])
def test_unwrap_shift(index, size, expected):
    assert unwrap_shift(index, size) == expected
