"""2-D spectral algebra, regression labels and windows.

DFT convention used throughout the package: the forward transform is
unnormalized and the inverse divides by the number of cells (numpy's
default). Both transforms act on the first two axes, so a ``(rows, cols,
channels)`` array is transformed channel by channel.
"""

import numpy as np


def _check_grid(a):
    a = np.asarray(a)
    if a.ndim < 2:
        raise ValueError(f"expected at least a 2-D grid, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"zero-sized grid {a.shape}")
    return a


def dft2(grid):
    """Unnormalized forward 2-D DFT over the two leading axes."""
    grid = _check_grid(grid)
    return np.fft.fft2(grid, axes=(0, 1))


def idft2(spec, real=True):
    """Inverse 2-D DFT (divides by rows*cols); returns the real part by default."""
    spec = _check_grid(spec)
    out = np.fft.ifft2(spec, axes=(0, 1))
    return out.real if real else out


def gaussian_labels(rows, cols, sigma0):
    """Gaussian regression target peaking at 1 in cell ``(rows // 2, cols // 2)``.

    ``y[m, n] = exp(-((m - rows//2)**2 + (n - cols//2)**2) / (2 sigma0**2))``
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"label grid must be at least 1x1, got {rows}x{cols}")
    if not sigma0 > 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    m = np.arange(rows) - rows // 2
    n = np.arange(cols) - cols // 2
    d2 = m[:, None] ** 2 + n[None, :] ** 2
    return np.exp(-0.5 * d2 / sigma0**2)


def shift_to_origin(labels):
    """Circularly shift a centred label map so its peak sits at index (0, 0)."""
    labels = np.asarray(labels)
    return np.roll(labels, (-(labels.shape[0] // 2), -(labels.shape[1] // 2)), axis=(0, 1))


def cosine_window(rows, cols):
    """Outer product of two Hann windows; a length-1 axis has weight 1."""
    if rows < 1 or cols < 1:
        raise ValueError(f"window must be at least 1x1, got {rows}x{cols}")
    return np.outer(np.hanning(rows), np.hanning(cols))


def unwrap_shift(index, size):
    """Map a circular index to a signed shift in ``(-size/2, size/2]``."""
    return index - size if index > size // 2 else index
