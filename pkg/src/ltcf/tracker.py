"""Three-filter long-term tracker.

Per frame: the translation filter relocates the target inside a context
window of fixed (first-frame) size, the scale filter then rescales the box
at that new position, and the long-term filter scores the result. A low
score triggers SVM re-detection; the long-term filter and the SVM only learn
from frames whose score clears the stability threshold.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ltcf import cfilter, detector
from ltcf.boxes import BoundingBox
from ltcf.features import (
    ContextSpec,
    context_box,
    extract_patch,
    resize,
    scale_pyramid,
    to_gray,
    to_lab,
    translation_features,
)
from ltcf.kvconfig import build_dataclass, load_dataclass
from ltcf.spectral import gaussian_labels, shift_to_origin

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrackerConfig:
    reg_lambda: float = 1e-4
    kernel_sigma: float = 0.1
    kernel_normalize: bool = True
    label_sigma_factor: float = 0.1
    eta: float = 0.01
    num_scales: int = 21
    scale_factor: float = 1.03
    scale_label_sigma: float = 1.0
    scale_model_max_area: float = 1024.0
    tau: float = 1.0
    t_r: float = 0.15
    t_a: float = 0.38
    t_s: float = 0.38
    context_ratio: float = 2.8
    aspect_threshold: float = 0.5
    vertical_ratio_divisor: float = 2.0
    cell_size: int = 4
    hoi_bins: int = 8
    rank_radius: int = 1
    long_term_window: bool = False
    long_term_margin: int = 0  # cells added on each side of the tight box
    subcell_peak: bool = True  # parabolic interpolation of the translation peak
    hold_when_lost: bool = True  # skip short-term updates after a failed re-detection
    svm_search_extent: float = 2.0
    svm_train_stride: Optional[int] = None
    detect_stride: Optional[int] = None
    min_box: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.t_r <= self.t_a:
            raise ValueError(f"need 0 < t_r <= t_a, got t_r={self.t_r}, t_a={self.t_a}")
        if not self.t_s > 0:
            raise ValueError(f"t_s must be positive, got {self.t_s}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.num_scales < 1 or self.num_scales % 2 == 0:
            raise ValueError(f"num_scales must be odd, got {self.num_scales}")
        if not self.scale_factor > 1:
            raise ValueError(f"scale_factor must exceed 1, got {self.scale_factor}")
        if self.reg_lambda <= 0 or self.kernel_sigma <= 0 or self.label_sigma_factor <= 0:
            raise ValueError("reg_lambda, kernel_sigma and label_sigma_factor must be positive")
        if self.cell_size < 1 or self.hoi_bins < 2 or self.rank_radius < 1:
            raise ValueError("cell_size >= 1, hoi_bins >= 2 and rank_radius >= 1 required")
        if self.long_term_margin < 0:
            raise ValueError(f"long_term_margin must be >= 0, got {self.long_term_margin}")
        if not self.context_ratio >= 1:
            raise ValueError(f"context_ratio must be >= 1, got {self.context_ratio}")

    @classmethod
    def from_file(cls, path):
        return load_dataclass(cls, path)

    @classmethod
    def from_mapping(cls, values):
        return build_dataclass(cls, dict(values))


@dataclass
class StepDiagnostics:
    confidence: float
    redetection_attempted: bool = False
    redetection_accepted: bool = False
    translation_peak: float = 0.0
    scale_index: int = 0
    long_term_updated: bool = False
    num_candidates: int = 0


@dataclass
class TrackerState:
    config: TrackerConfig
    frame_shape: tuple
    box: BoundingBox
    base_size: tuple  # first-frame (w, h)
    window_size: tuple  # translation context window, pixels
    long_size: tuple  # long-term filter patch, pixels
    scale_model_size: tuple
    translation: cfilter.CorrelationFilter
    scale: cfilter.ScaleFilter
    long_term: cfilter.CorrelationFilter
    svm: detector.SvmModel
    rng: np.random.Generator
    stable_size: tuple = None  # box size at the last long-term update
    frame_index: int = 0
    long_term_updates: list = field(default_factory=list)

    @property
    def position(self):
        return self.box.center


def _labels(grid_shape, target_size, cfg):
    sigma0 = cfg.label_sigma_factor * np.sqrt(target_size[0] * target_size[1]) / cfg.cell_size
    return shift_to_origin(gaussian_labels(grid_shape[0], grid_shape[1], sigma0))


def _features(cfg, patch, window=True):
    return translation_features(patch, cfg.cell_size, cfg.hoi_bins, cfg.rank_radius, window=window)


def _train(cfg, x, labels):
    return cfilter.train(x, labels, cfg.reg_lambda, cfg.kernel_sigma, cfg.eta, cfg.kernel_normalize)


def _translation_features(state, gray, center):
    return _features(state.config, extract_patch(gray, center, state.window_size))


def _clip_to_frame(box, frame_shape):
    H, W = frame_shape[:2]
    x0, y0 = max(0.0, box.x), max(0.0, box.y)
    x1, y1 = min(float(W), box.x + box.w), min(float(H), box.y + box.h)
    if x1 - x0 >= 1 and y1 - y0 >= 1:
        return BoundingBox(x0, y0, x1 - x0, y1 - y0)
    return box


def _long_term_features(state, gray, box):
    cfg = state.config
    box = _clip_to_frame(BoundingBox(*box), gray.shape)
    # the margin scales with the box so the patch keeps the first-frame layout
    m = cfg.long_term_margin * cfg.cell_size
    sx = box.w / state.base_size[0]
    sy = box.h / state.base_size[1]
    size = (max(1, round(box.w + 2 * m * sx)), max(1, round(box.h + 2 * m * sy)))
    patch = extract_patch(gray, box.center, size)
    return _features(cfg, resize(patch, state.long_size), cfg.long_term_window)


def _pyramid(state, gray, center, size):
    cfg = state.config
    return scale_pyramid(gray, center, size, cfg.num_scales, cfg.scale_factor, cfg.cell_size, state.scale_model_size)


def _svm_samples(state, lab, box):
    cfg = state.config
    return detector.generate_samples(
        None, box, cfg.svm_search_extent, cfg.svm_train_stride, lab=lab, rank_radius=cfg.rank_radius
    )


def _scale_model_size(size, cfg):
    w, h = size
    area = w * h
    factor = min(1.0, np.sqrt(cfg.scale_model_max_area / area)) if cfg.scale_model_max_area > 0 else 1.0
    return (max(cfg.cell_size, int(np.floor(w * factor))), max(cfg.cell_size, int(np.floor(h * factor))))


def _clamp_center(cx, cy, frame_shape):
    H, W = frame_shape[:2]
    return float(np.clip(cx, 0, W - 1)), float(np.clip(cy, 0, H - 1))


def init(frame, box, config=None):
    """Train all three filters and the SVM on the first frame."""
    cfg = config or TrackerConfig()
    frame = np.asarray(frame, dtype=np.float64)
    box = BoundingBox(*map(float, box)).validate()
    H, W = frame.shape[:2]
    if box.x + box.w <= 0 or box.y + box.h <= 0 or box.x >= W or box.y >= H:
        raise ValueError(f"initial box {tuple(box)} lies outside the {W}x{H} frame")
    gray = to_gray(frame)
    size = (box.w, box.h)
    spec = ContextSpec(cfg.context_ratio, cfg.aspect_threshold, cfg.vertical_ratio_divisor)
    cw, ch = context_box(size, spec)
    window = (max(cfg.cell_size, int(round(cw))), max(cfg.cell_size, int(round(ch))))
    margin = 2 * cfg.long_term_margin * cfg.cell_size
    long_size = (max(cfg.cell_size, int(round(box.w)) + margin), max(cfg.cell_size, int(round(box.h)) + margin))

    # filters are filled in below once the geometry is fixed
    state = TrackerState(
        config=cfg,
        frame_shape=frame.shape,
        box=box,
        base_size=size,
        window_size=window,
        long_size=long_size,
        scale_model_size=_scale_model_size(size, cfg),
        translation=None,
        scale=None,
        long_term=None,
        svm=None,
        rng=np.random.default_rng(cfg.seed),
        stable_size=size,
    )
    xt = _translation_features(state, gray, box.center)
    state.translation = _train(cfg, xt, _labels(xt.shape[:2], size, cfg))
    xl = _long_term_features(state, gray, box)
    state.long_term = _train(cfg, xl, _labels(xl.shape[:2], size, cfg))
    state.scale = cfilter.train_scale_filter(
        _pyramid(state, gray, box.center, size),
        cfg.reg_lambda,
        cfg.kernel_sigma,
        cfg.scale_label_sigma,
        cfg.eta,
        cfg.kernel_normalize,
    )
    lab = to_lab(frame)
    samples = _svm_samples(state, lab, box)
    dim = 5 if lab.shape[2] == 1 else 65
    state.svm = detector.train_svm(detector.SvmModel.zeros(dim, cfg.tau), samples, state.rng)
    log.debug("init box=%s window=%s samples=%d", tuple(box), window, len(samples))
    return state


def confidence(state, box, frame):
    """Maximum long-term filter response on the tight patch at ``box``."""
    gray = to_gray(frame)
    return respond_long_term(state, gray, box).value


def respond_long_term(state, gray, box):
    return cfilter.respond(state.long_term, _long_term_features(state, gray, box))


def _refine_candidate(state, gray, box):
    """Move a detector window by its long-term peak offset; return ``(box, score)``.

    The scan grid is coarse, so a window can sit several pixels off the
    target; the long-term response there still peaks at the true offset.
    """
    box = BoundingBox(*map(float, box))
    response = respond_long_term(state, gray, box)
    dr, dc = response.shift()
    if dr == 0 and dc == 0:
        return box, response.value
    sx, sy = box.w / state.base_size[0], box.h / state.base_size[1]
    cx, cy = box.center
    cx, cy = _clamp_center(cx + dc * state.config.cell_size * sx, cy + dr * state.config.cell_size * sy, gray.shape)
    moved = BoundingBox.from_center(cx, cy, box.w, box.h)
    score = respond_long_term(state, gray, moved).value
    return (moved, score) if score > response.value else (box, response.value)


def step(state, frame):
    """Track one frame, updating ``state`` in place. Returns ``(box, diagnostics)``."""
    cfg = state.config
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[:2] != state.frame_shape[:2]:
        raise ValueError(f"frame shape {frame.shape[:2]} differs from sequence shape {state.frame_shape[:2]}")
    gray = to_gray(frame)
    w, h = state.box.w, state.box.h

    # translation, at the previous position and the first-frame window size
    cx, cy = state.box.center
    response = cfilter.respond(state.translation, _translation_features(state, gray, (cx, cy)))
    dr, dc = response.subcell_shift() if cfg.subcell_peak else response.shift()
    cx, cy = _clamp_center(cx + dc * cfg.cell_size, cy + dr * cfg.cell_size, frame.shape)

    # scale, around the position just found
    s, _, scale_index = cfilter.estimate_scale(state.scale, _pyramid(state, gray, (cx, cy), (w, h)))
    H, W = frame.shape[:2]
    w = float(np.clip(w * s, cfg.min_box, W))
    h = float(np.clip(h * s, cfg.min_box, H))
    box = BoundingBox.from_center(cx, cy, w, h)

    conf = respond_long_term(state, gray, box).value
    diag = StepDiagnostics(conf, translation_peak=response.value, scale_index=scale_index)
    lab = None
    if conf < cfg.t_r:
        diag.redetection_attempted = True
        lab = to_lab(frame)
        if cfg.hold_when_lost:
            # scan at the last trusted size; the scale estimate is meaningless while lost
            w, h = state.stable_size
        candidates = detector.detect(None, state.svm, (w, h), cfg.detect_stride, lab=lab, rank_radius=cfg.rank_radius)
        diag.num_candidates = len(candidates)
        best, best_score = None, -np.inf
        for cand in candidates:
            refined, score = _refine_candidate(state, gray, cand.box)
            if score > best_score:
                best, best_score = refined, score
        if best is not None and best_score > cfg.t_a:
            diag.redetection_accepted = True
            box, conf = best, best_score
            cx, cy = box.center
            log.debug("frame %d: re-detected at %s (score %.3f)", state.frame_index + 1, tuple(box), conf)
        elif cfg.hold_when_lost:
            box = BoundingBox.from_center(cx, cy, state.box.w, state.box.h)
    diag.confidence = conf

    # a failed re-detection means the target is not in view: learn nothing
    lost = cfg.hold_when_lost and diag.redetection_attempted and not diag.redetection_accepted
    if not lost:
        state.translation = cfilter.update(state.translation, _translation_features(state, gray, (cx, cy)))
        state.scale = cfilter.update_scale_filter(state.scale, _pyramid(state, gray, (cx, cy), (box.w, box.h)))
    if conf > cfg.t_s:
        state.long_term = cfilter.update(state.long_term, _long_term_features(state, gray, box))
        lab = to_lab(frame) if lab is None else lab
        state.svm = detector.train_svm(state.svm, _svm_samples(state, lab, box), state.rng)
        diag.long_term_updated = True
        state.stable_size = (box.w, box.h)
        state.long_term_updates.append(state.frame_index + 1)

    state.box = box
    state.frame_index += 1
    return box, diag
