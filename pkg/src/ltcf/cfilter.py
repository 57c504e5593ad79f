"""Kernelized correlation filters: training, detection, update, fusion and scale regression.

Feature maps are ``(rows, cols)`` or ``(rows, cols, channels)`` arrays; a 1-D
signal of length ``n`` is passed as an ``(n, 1)`` map. Label maps used by
the tracker are pre-shifted so the peak sits at cell (0, 0); a response
peak at ``(dr, dc)`` then means the query is the template cyclically shifted
by ``(dr, dc)``.
"""

from dataclasses import dataclass, replace

import numpy as np

from ltcf.spectral import dft2, idft2, unwrap_shift


def _as3d(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        return x[..., None]
    if x.ndim != 3:
        raise ValueError(f"feature maps must be 2-D or 3-D, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class CorrelationFilter:
    alpha_spectrum: np.ndarray  # (rows, cols) complex dual coefficients
    template: np.ndarray  # (rows, cols, channels)
    label_spectrum: np.ndarray  # (rows, cols) complex
    kernel_sigma: float
    lam: float
    learning_rate: float = 0.01
    normalize_kernel: bool = False

    @property
    def shape(self):
        return self.template.shape[:2]

    @property
    def dual_coefficients(self):
        return idft2(self.alpha_spectrum)


@dataclass(frozen=True)
class ResponseMap:
    grid: np.ndarray
    peak: tuple  # (row, col, value)

    @classmethod
    def from_grid(cls, grid):
        r, c = np.unravel_index(np.argmax(grid), grid.shape)
        return cls(grid, (int(r), int(c), float(grid[r, c])))

    @property
    def value(self):
        return self.peak[2]

    def shift(self):
        """Peak position as a signed cyclic shift ``(dr, dc)`` in cells."""
        r, c, _ = self.peak
        return unwrap_shift(r, self.grid.shape[0]), unwrap_shift(c, self.grid.shape[1])

    def subcell_shift(self):
        """``shift()`` refined by a parabola through the peak and its two cyclic neighbours per axis."""
        r, c, v = self.peak
        rows, cols = self.grid.shape
        dr, dc = self.shift()
        return dr + _parabola_offset(self.grid[(r - 1) % rows, c], v, self.grid[(r + 1) % rows, c]), dc + (
            _parabola_offset(self.grid[r, (c - 1) % cols], v, self.grid[r, (c + 1) % cols])
        )


def _parabola_offset(left, mid, right):
    denom = left - 2.0 * mid + right
    if not denom < 0:
        return 0.0
    return float(np.clip(0.5 * (left - right) / denom, -0.5, 0.5))


def kernel_correlation(x, x2, sigma, normalize=False):
    """Gaussian kernel between ``x`` and every cyclic shift of ``x2``.

    ``k[i] = exp(-||x - P_i x2||^2 / sigma^2)`` where ``P_i x2`` is ``x2``
    rolled by ``+i`` along the two leading axes and the squared norm runs
    over all channels jointly. With ``normalize`` the squared distance is
    divided by the element count, which keeps ``sigma`` meaningful across
    feature sizes.
    """
    x, x2 = _as3d(x), _as3d(x2)
    if x.shape != x2.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {x2.shape}")
    if not sigma > 0:
        raise ValueError(f"kernel sigma must be positive, got {sigma}")
    cross = idft2((dft2(x) * np.conj(dft2(x2))).sum(axis=2))
    d2 = np.maximum(0.0, (x**2).sum() + (x2**2).sum() - 2.0 * cross)
    if normalize:
        d2 /= x.size
    return np.exp(-d2 / sigma**2)


def train(x, labels, lam, sigma, learning_rate=0.01, normalize_kernel=False):
    """Fit dual coefficients ``A = Y / (K^{xx} + lam)`` over all cyclic shifts of ``x``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not 0 < learning_rate <= 1:
        raise ValueError(f"learning rate must lie in (0, 1], got {learning_rate}")
    x = _as3d(x)
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != x.shape[:2]:
        raise ValueError(f"labels {labels.shape} do not match feature grid {x.shape[:2]}")
    yf = dft2(labels)
    kf = dft2(kernel_correlation(x, x, sigma, normalize_kernel))
    return CorrelationFilter(yf / (kf + lam), x, yf, sigma, lam, learning_rate, normalize_kernel)


def train_linear(x, labels, lam):
    """Spectrum ``W = X Y / (X conj(X) + lam)`` of the linear ridge filter.

    Sample ``i`` of the implied ridge regression is ``x`` rolled by ``+i``
    and scored by ``<w, roll(x, i)>``; ``idft2(W)`` is the spatial filter.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("linear filter takes a single-channel map")
    if np.shape(labels) != x.shape:
        raise ValueError(f"labels {np.shape(labels)} do not match {x.shape}")
    xf, yf = dft2(x), dft2(labels)
    return xf * yf / (xf * np.conj(xf) + lam)


def respond(filt, z):
    """Response map ``idft2(K^{z x~} * A)`` of ``filt`` on features ``z``."""
    z = _as3d(z)
    if z.shape != filt.template.shape:
        raise ValueError(f"query {z.shape} does not match template {filt.template.shape}")
    kf = dft2(kernel_correlation(z, filt.template, filt.kernel_sigma, filt.normalize_kernel))
    return ResponseMap.from_grid(idft2(kf * filt.alpha_spectrum))


def update(filt, x_new, labels=None, learning_rate=None):
    """Moving-average update of template and dual coefficients.

    ``x~ <- (1-eta) x~ + eta x_new`` and likewise for the dual spectrum,
    where the new dual spectrum is a fresh fit on ``x_new``.
    """
    eta = filt.learning_rate if learning_rate is None else learning_rate
    if not 0 < eta <= 1:
        raise ValueError(f"learning rate must lie in (0, 1], got {eta}")
    x_new = _as3d(x_new)
    if x_new.shape != filt.template.shape:
        raise ValueError(f"update {x_new.shape} does not match template {filt.template.shape}")
    if labels is None:
        yf = filt.label_spectrum
    else:
        yf = dft2(np.asarray(labels, dtype=np.float64))
    kf = dft2(kernel_correlation(x_new, x_new, filt.kernel_sigma, filt.normalize_kernel))
    fresh = yf / (kf + filt.lam)
    return replace(
        filt,
        alpha_spectrum=(1 - eta) * filt.alpha_spectrum + eta * fresh,
        template=(1 - eta) * filt.template + eta * x_new,
        label_spectrum=yf,
    )


def fuse_responses(f1, f2):
    """Average of two response maps viewed as distributions over positions.

    Negative scores are clipped to zero, each map is scaled to sum 1, and the
    element-wise mean is the distribution closest to both in summed KL
    divergence.
    """
    g1 = np.asarray(getattr(f1, "grid", f1), dtype=np.float64)
    g2 = np.asarray(getattr(f2, "grid", f2), dtype=np.float64)
    if g1.shape != g2.shape:
        raise ValueError(f"shape mismatch: {g1.shape} vs {g2.shape}")
    probs = []
    for g in (g1, g2):
        g = np.clip(g, 0.0, None)
        total = g.sum()
        if not total > 0:
            raise ValueError("cannot fuse a response map with no positive mass")
        probs.append(g / total)
    return ResponseMap.from_grid(0.5 * (probs[0] + probs[1]))


@dataclass(frozen=True)
class ScaleFilter:
    filter: CorrelationFilter
    scales: np.ndarray
    alpha: float
    label_sigma: float

    @property
    def num_scales(self):
        return len(self.scales)

    @property
    def center_index(self):
        return (self.num_scales - 1) // 2


def scale_labels(num_scales, label_sigma):
    """1-D Gaussian target over pyramid levels, peaking at the middle (scale 1)."""
    n = np.arange(num_scales) - (num_scales - 1) // 2
    return np.exp(-0.5 * n**2 / label_sigma**2)


def _pyramid_signal(pyramid):
    levels = getattr(pyramid, "levels", pyramid)
    levels = np.asarray(levels, dtype=np.float64)
    return levels[:, None, :]


def train_scale_filter(pyramid, lam, sigma, label_sigma=1.0, learning_rate=0.01, normalize_kernel=True):
    """Kernelized 1-D filter over pyramid levels, one channel per feature dimension."""
    signal = _pyramid_signal(pyramid)
    n = signal.shape[0]
    if n % 2 == 0:
        raise ValueError(f"number of scales must be odd, got {n}")
    labels = scale_labels(n, label_sigma)[:, None]
    filt = train(signal, labels, lam, sigma, learning_rate, normalize_kernel)
    alpha = float(pyramid.scales[1] / pyramid.scales[0]) if n > 1 else 1.0
    return ScaleFilter(filt, np.asarray(pyramid.scales), alpha, label_sigma)


def update_scale_filter(sf, pyramid, learning_rate=None):
    signal = _pyramid_signal(pyramid)
    if signal.shape != sf.filter.template.shape:
        raise ValueError(f"pyramid {signal.shape} does not match scale filter {sf.filter.template.shape}")
    return replace(sf, filter=update(sf.filter, signal, learning_rate=learning_rate))


def estimate_scale(sf, pyramid):
    """Return ``(s*, score, level_index)`` maximizing the 1-D scale response.

    The response is read in level order: a query pyramid whose target grew
    by one scale step peaks one level above the middle.
    """
    signal = _pyramid_signal(pyramid)
    if signal.shape != sf.filter.template.shape:
        raise ValueError(f"pyramid {signal.shape} does not match scale filter {sf.filter.template.shape}")
    response = respond(sf.filter, signal).grid[:, 0]
    # labels peak at the middle level, so a self-match responds there
    idx = int(np.argmax(response))
    return float(sf.scales[idx]), float(response[idx]), idx
