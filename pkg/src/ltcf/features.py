"""Patch extraction and hand-crafted features.

Images are float arrays with values in [0, 1], shaped ``(H, W)`` for gray or
``(H, W, 3)`` for RGB. Feature maps are ``(cell_rows, cell_cols, channels)``.
Pixel ``(row, col)`` covers the unit square starting at ``(col, row)``, so the
centre of a box ``(x, y, w, h)`` is ``(x + w/2, y + h/2)``.
"""

from dataclasses import dataclass

import cv2
import numpy as np

from ltcf.spectral import cosine_window

HOG_CHANNELS = 31

# unit vectors of the nine contrast-insensitive orientations (20 degree steps)
_UU = np.cos(np.arange(9) * np.pi / 9)
_VV = np.sin(np.arange(9) * np.pi / 9)
_HOG_TRUNC = 0.2


@dataclass(frozen=True)
class ContextSpec:
    ratio: float = 2.8
    aspect_rule_threshold: float = 0.5
    vertical_ratio_divisor: float = 2.0

    def __post_init__(self):
        if not self.ratio >= 1:
            raise ValueError(f"context ratio must be >= 1, got {self.ratio}")


@dataclass(frozen=True)
class FeaturePyramid:
    levels: np.ndarray  # (N, D), one vectorized HOG map per scale
    scales: np.ndarray  # (N,)
    base_size: tuple  # (W, H) in pixels
    cell_shape: tuple  # (cell_rows, cell_cols)


def to_gray(image):
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    # ITU-R BT.601 luma, same weights as cv2's RGB2GRAY
    return image[..., 0] * 0.299 + image[..., 1] * 0.587 + image[..., 2] * 0.114


def extract_patch(frame, center, size):
    """Crop a ``w x h`` patch centred at ``center=(x, y)``.

    Pixels outside the frame replicate the nearest border pixel, so the call
    never fails for a finite centre, even far outside the frame.
    """
    cx, cy = center
    if not (np.isfinite(cx) and np.isfinite(cy)):
        raise ValueError(f"patch centre must be finite, got {center}")
    w, h = int(round(size[0])), int(round(size[1]))
    if w < 1 or h < 1:
        raise ValueError(f"patch size must be at least 1x1, got {size}")
    frame = np.asarray(frame)
    x0 = int(np.floor(cx - w / 2 + 0.5))
    y0 = int(np.floor(cy - h / 2 + 0.5))
    xs = np.clip(np.arange(x0, x0 + w), 0, frame.shape[1] - 1)
    ys = np.clip(np.arange(y0, y0 + h), 0, frame.shape[0] - 1)
    return frame[ys[:, None], xs[None, :]]


def resize(patch, size):
    """Bilinear resize to ``size=(w, h)``."""
    w, h = int(size[0]), int(size[1])
    if patch.shape[1] == w and patch.shape[0] == h:
        return patch
    return cv2.resize(patch.astype(np.float32), (w, h), interpolation=cv2.INTER_LINEAR).astype(np.float64)


def sample_patch(frame, center, size, out_size):
    """Bilinearly sample the real-valued region ``size=(w, h)`` around ``center`` onto ``out_size``.

    Unlike ``extract_patch`` followed by ``resize`` the region is not rounded
    to whole pixels, so regions whose sizes differ by a few percent map to
    exactly rescaled samples. Borders replicate.
    """
    cx, cy = center
    if not (np.isfinite(cx) and np.isfinite(cy)):
        raise ValueError(f"patch centre must be finite, got {center}")
    ow, oh = int(out_size[0]), int(out_size[1])
    if ow < 1 or oh < 1 or not (size[0] > 0 and size[1] > 0):
        raise ValueError(f"invalid sampling sizes {size} -> {out_size}")
    sx, sy = size[0] / ow, size[1] / oh
    # output pixel u has centre u + 0.5; cv2 puts input pixel centres at integers
    m = np.array([[sx, 0.0, cx - size[0] / 2 + 0.5 * sx - 0.5], [0.0, sy, cy - size[1] / 2 + 0.5 * sy - 0.5]])
    frame = np.asarray(frame, dtype=np.float32)
    out = cv2.warpAffine(
        frame, m, (ow, oh), flags=cv2.INTER_LINEAR | cv2.WARP_INVERSE_MAP, borderMode=cv2.BORDER_REPLICATE
    )
    return out.astype(np.float64)


def context_box(target_size, spec=ContextSpec()):
    """Size of the context-padded search window for a ``(w, h)`` target.

    Both sides are scaled by ``spec.ratio``; for narrow targets (aspect below
    the threshold) the vertical padding is cut by ``vertical_ratio_divisor``.
    """
    w, h = target_size
    if not (w > 0 and h > 0):
        raise ValueError(f"target size must be positive, got {target_size}")
    r = spec.ratio
    if w / h < spec.aspect_rule_threshold:
        return r * w, h + (r - 1) * h / spec.vertical_ratio_divisor
    return r * w, r * h


def _gradients(image):
    # centred differences with replicated borders; color images keep the
    # channel with the largest magnitude at each pixel
    p = np.pad(image, ((1, 1), (1, 1)) + ((0, 0),) * (image.ndim - 2), mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    if image.ndim == 3:
        mag2 = dx**2 + dy**2
        best = mag2.argmax(axis=2)[..., None]
        dx = np.take_along_axis(dx, best, axis=2)[..., 0]
        dy = np.take_along_axis(dy, best, axis=2)[..., 0]
    return dx, dy


def _cell_histograms(patch, cell_size, rows, cols):
    dx, dy = _gradients(patch)
    mag = np.sqrt(dx**2 + dy**2)
    dots = dx[..., None] * _UU + dy[..., None] * _VV
    orient = np.concatenate([dots, -dots], axis=2).argmax(axis=2)

    # each pixel votes into its four nearest cell centres (bilinear in space)
    h, w = patch.shape[:2]
    yp = (np.arange(h) + 0.5) / cell_size - 0.5
    xp = (np.arange(w) + 0.5) / cell_size - 0.5
    iy, ix = np.floor(yp).astype(int), np.floor(xp).astype(int)
    vy0, vx0 = yp - iy, xp - ix
    size = (rows + 2) * (cols + 2) * 18
    hist = np.zeros(size)
    for oy, wy in ((0, 1 - vy0), (1, vy0)):
        for ox, wx in ((0, 1 - vx0), (1, vx0)):
            # out-of-grid votes land in a one-cell margin that is dropped below
            cy = np.clip(iy + oy, -1, rows) + 1
            cx = np.clip(ix + ox, -1, cols) + 1
            flat = (cy[:, None] * (cols + 2) + cx[None, :]) * 18 + orient
            hist += np.bincount(flat.ravel(), (wy[:, None] * wx[None, :] * mag).ravel(), size)
    return hist.reshape(rows + 2, cols + 2, 18)[1:-1, 1:-1]


def hog(patch, cell_size=4):
    """31-channel Felzenszwalb HOG.

    Channels 0-17 are contrast-sensitive orientations (20 degree bins over
    the full circle), 18-26 contrast-insensitive ones, and 27-30 gradient
    energy under each of the four block normalizations. Cells beyond
    ``floor(size / cell_size)`` are dropped; block norms at the grid border
    reuse the nearest interior norm.
    """
    patch = np.asarray(patch, dtype=np.float64)
    rows, cols = patch.shape[0] // cell_size, patch.shape[1] // cell_size
    if cell_size < 1 or rows < 1 or cols < 1:
        raise ValueError(f"patch {patch.shape[:2]} is smaller than one {cell_size}px cell")
    hist = _cell_histograms(patch, cell_size, rows, cols)

    energy = (hist[..., :9] + hist[..., 9:]) ** 2
    energy = np.pad(energy.sum(axis=2), 1, mode="edge")
    # sum of energies over the 2x2 block whose top-left cell is (i, j)
    block = energy[:-1, :-1] + energy[1:, :-1] + energy[:-1, 1:] + energy[1:, 1:]
    eps = 1e-4
    norms = [
        1.0 / np.sqrt(block[dy : dy + rows, dx : dx + cols] + eps)
        for dy, dx in ((1, 1), (0, 1), (1, 0), (0, 0))
    ]

    insensitive = hist[..., :9] + hist[..., 9:]
    out = np.zeros((rows, cols, HOG_CHANNELS))
    for n in norms:
        n = n[..., None]
        sens = np.minimum(hist * n, _HOG_TRUNC)
        out[..., :18] += 0.5 * sens
        out[..., 18:27] += 0.5 * np.minimum(insensitive * n, _HOG_TRUNC)
    for k, n in enumerate(norms):
        out[..., 27 + k] = 0.2357 * np.minimum(hist * n[..., None], _HOG_TRUNC).sum(axis=2)
    return out


def rank_transform(gray, radius=1):
    """Fraction of neighbours in the ``(2r+1)^2`` window strictly darker than the centre."""
    if radius < 1:
        raise ValueError(f"rank radius must be >= 1, got {radius}")
    gray = np.asarray(gray, dtype=np.float64)
    if gray.ndim != 2:
        raise ValueError("rank transform needs a single-channel image")
    p = np.pad(gray, radius, mode="edge")
    h, w = gray.shape
    count = np.zeros_like(gray)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            count += p[dy : dy + h, dx : dx + w] < gray
    return count / ((2 * radius + 1) ** 2 - 1)


def _quantize(values, bins):
    return np.minimum((values * bins).astype(int), bins - 1).clip(0)


def hoi(gray, cell_size=4, bins=8):
    """Per-cell histogram of intensities, L1-normalized within every cell."""
    if bins < 2:
        raise ValueError(f"need at least 2 intensity bins, got {bins}")
    gray = np.asarray(gray, dtype=np.float64)
    if gray.ndim != 2:
        raise ValueError("HOI needs a single-channel image")
    rows, cols = gray.shape[0] // cell_size, gray.shape[1] // cell_size
    if cell_size < 1 or rows < 1 or cols < 1:
        raise ValueError(f"patch {gray.shape} is smaller than one {cell_size}px cell")
    q = _quantize(gray[: rows * cell_size, : cols * cell_size], bins)
    q = q.reshape(rows, cell_size, cols, cell_size).transpose(0, 2, 1, 3).reshape(rows, cols, -1)
    onehot = q[..., None] == np.arange(bins)
    return onehot.sum(axis=2) / float(cell_size * cell_size)


def hoi_features(gray, cell_size=4, bins=8, rank_radius=1):
    """HOI on raw intensity and on its rank transform, channel-concatenated."""
    return np.concatenate(
        [hoi(gray, cell_size, bins), hoi(rank_transform(gray, rank_radius), cell_size, bins)],
        axis=2,
    )


def translation_features(patch, cell_size=4, bins=8, rank_radius=1, window=True):
    """HOG + HOI (47 channels at the defaults), cosine-windowed per channel unless ``window=False``."""
    gray = to_gray(patch)
    feat = np.concatenate([hog(gray, cell_size), hoi_features(gray, cell_size, bins, rank_radius)], axis=2)
    if window:
        feat = feat * cosine_window(*feat.shape[:2])[..., None]
    return feat


def pyramid_scales(num_scales, alpha):
    if num_scales < 1 or num_scales % 2 == 0:
        raise ValueError(f"number of scales must be odd, got {num_scales}")
    if not alpha > 1:
        raise ValueError(f"scale step must exceed 1, got {alpha}")
    half = (num_scales - 1) // 2
    return alpha ** np.arange(-half, half + 1, dtype=np.float64)


def scale_pyramid(frame, center, base_size, num_scales=21, alpha=1.03, cell_size=4, model_size=None):
    """Vectorized HOG of ``s*W x s*H`` crops around ``center`` for every scale ``s``.

    Every region is sampled bilinearly onto ``model_size`` (defaults to
    ``base_size``) without rounding its size to whole pixels, so all levels
    share a length and neighbouring levels differ by exactly ``alpha``.
    """
    scales = pyramid_scales(num_scales, alpha)
    model_size = tuple(int(round(v)) for v in (model_size or base_size))
    if model_size[0] < cell_size or model_size[1] < cell_size:
        raise ValueError(f"model size {model_size} is smaller than one {cell_size}px cell")
    gray = to_gray(frame)
    levels = []
    for s in scales:
        patch = sample_patch(gray, center, (s * base_size[0], s * base_size[1]), model_size)
        levels.append(hog(patch, cell_size).ravel())
    cell_shape = (model_size[1] // cell_size, model_size[0] // cell_size)
    return FeaturePyramid(np.stack(levels), scales, tuple(base_size), cell_shape)


def to_lab(frame):
    """CIE LAB of an RGB frame (L in [0, 100]); gray frames give L only."""
    frame = np.asarray(frame, dtype=np.float32)
    if frame.ndim == 2:
        return frame[..., None].astype(np.float64) * 100.0
    return cv2.cvtColor(frame, cv2.COLOR_RGB2LAB).astype(np.float64)


def clip_box(box, frame_shape):
    """Integer pixel bounds ``(x0, y0, x1, y1)`` of a box clipped to the frame."""
    x, y, w, h = box
    H, W = frame_shape[:2]
    x0, y0 = max(0, int(round(x))), max(0, int(round(y)))
    x1, y1 = min(W, int(round(x + w))), min(H, int(round(y + h)))
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"box {tuple(box)} has no area inside a {W}x{H} frame")
    return x0, y0, x1, y1


def lab_histogram_from_lab(lab_crop, bins=4, rank_radius=1):
    """Joint LAB histogram of an already-converted crop, plus a bias entry of 1."""
    lq = _quantize(rank_transform(lab_crop[..., 0] / 100.0, rank_radius), bins)
    if lab_crop.shape[2] == 1:
        index, size = lq, bins
    else:
        aq = _quantize((lab_crop[..., 1] + 128.0) / 256.0, bins)
        bq = _quantize((lab_crop[..., 2] + 128.0) / 256.0, bins)
        index, size = (lq * bins + aq) * bins + bq, bins**3
    hist = np.bincount(index.ravel(), minlength=size).astype(np.float64)
    return np.append(hist / index.size, 1.0)


def lab_histogram(frame, box, bins=4, rank_radius=1):
    """65-dim detector feature for ``box`` (5-dim on gray frames).

    The L channel is replaced by its rank transform, computed on the crop
    with replicated borders, so identical content anywhere in the frame
    yields an identical vector.
    """
    x0, y0, x1, y1 = clip_box(box, np.shape(frame))
    crop = np.asarray(frame)[y0:y1, x0:x1]
    return lab_histogram_from_lab(to_lab(crop), bins, rank_radius)
