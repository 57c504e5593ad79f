"""Per-frame errors and precision/success curves.

Conventions: a frame counts toward precision at threshold ``t`` when its
centre error is ``<= t`` pixels, and toward success at ``u`` when its IoU is
strictly ``> u``. With success sampled at 0, 0.05, ..., 1 a perfect tracker
therefore scores AUC = 20/21, because no frame has IoU > 1.
"""

from dataclasses import dataclass, field

import numpy as np

from ltcf.boxes import BoundingBox, cle, iou

PRECISION_THRESHOLDS = np.arange(0, 51, dtype=np.float64)
SUCCESS_THRESHOLDS = np.linspace(0.0, 1.0, 21)

# compass codes, clockwise from north; image y grows downward
DIRECTIONS = {
    1: (0, -1),
    2: (1, -1),
    3: (1, 0),
    4: (1, 1),
    5: (0, 1),
    6: (-1, 1),
    7: (-1, 0),
    8: (-1, -1),
}
DIRECTION_NAMES = {"n": 1, "ne": 2, "e": 3, "se": 4, "s": 5, "sw": 6, "w": 7, "nw": 8}


@dataclass
class EvalResult:
    name: str
    boxes: np.ndarray  # predicted, (n, 4)
    cle: np.ndarray  # NaN where ground truth is absent
    iou: np.ndarray
    confidence: np.ndarray = None
    redetected: np.ndarray = None
    fps: float = None

    def __post_init__(self):
        n = len(self.boxes)
        if len(self.cle) != n or len(self.iou) != n:
            raise ValueError("per-frame arrays must all have one entry per frame")

    @classmethod
    def from_boxes(cls, name, predicted, groundtruth, **kwargs):
        predicted = np.asarray(predicted, dtype=np.float64).reshape(-1, 4)
        groundtruth = np.asarray(groundtruth, dtype=np.float64).reshape(-1, 4)
        if len(predicted) != len(groundtruth):
            raise ValueError(f"{len(predicted)} predictions for {len(groundtruth)} ground-truth boxes")
        errors = np.full(len(predicted), np.nan)
        overlaps = np.full(len(predicted), np.nan)
        for i, (p, g) in enumerate(zip(predicted, groundtruth)):
            if np.all(np.isfinite(g)) and g[2] > 0 and g[3] > 0:
                errors[i] = cle(p, g)
                overlaps[i] = iou(p, g)
        return cls(name, predicted, errors, overlaps, **kwargs)

    @property
    def n_valid(self):
        return int(np.isfinite(self.cle).sum())


@dataclass
class CurveReport:
    precision: np.ndarray
    success: np.ndarray
    dp20: float
    os50: float
    auc: float
    mean_cle: float
    fps: float = None
    n_frames: int = 0
    precision_thresholds: np.ndarray = field(default_factory=lambda: PRECISION_THRESHOLDS.copy())
    success_thresholds: np.ndarray = field(default_factory=lambda: SUCCESS_THRESHOLDS.copy())

    def summary(self):
        return {"dp20": self.dp20, "os50": self.os50, "auc": self.auc, "mean_cle": self.mean_cle}


def curves(results):
    """Pool the valid frames of ``results`` into precision and success curves."""
    if isinstance(results, EvalResult):
        results = [results]
    if not results:
        raise ValueError("curves() needs at least one result")
    errors = np.concatenate([r.cle for r in results])
    overlaps = np.concatenate([r.iou for r in results])
    valid = np.isfinite(errors) & np.isfinite(overlaps)
    errors, overlaps = errors[valid], overlaps[valid]
    if errors.size == 0:
        raise ValueError("no frames with ground truth to evaluate")
    precision = (errors[None, :] <= PRECISION_THRESHOLDS[:, None]).mean(axis=1)
    success = (overlaps[None, :] > SUCCESS_THRESHOLDS[:, None]).mean(axis=1)
    fps_values = [r.fps for r in results if r.fps is not None]
    return CurveReport(
        precision=precision,
        success=success,
        dp20=float(precision[20]),
        os50=float(success[10]),
        auc=float(success.mean()),
        mean_cle=float(errors.mean()),
        fps=float(np.mean(fps_values)) if fps_values else None,
        n_frames=int(errors.size),
    )


def shift_init(box, direction, fraction=0.1):
    """Translate ``box`` by ``fraction`` of its width/height along a compass direction.

    ``direction`` is a code 1-8 (N, NE, E, SE, S, SW, W, NW) or its name.
    """
    if isinstance(direction, str):
        key = direction.lower()
        if key not in DIRECTION_NAMES:
            raise ValueError(f"unknown direction {direction!r}")
        direction = DIRECTION_NAMES[key]
    if direction not in DIRECTIONS:
        raise ValueError(f"direction code must be 1..8, got {direction}")
    if not 0 < fraction <= 0.5:
        raise ValueError(f"shift fraction must lie in (0, 0.5], got {fraction}")
    x, y, w, h = box
    ux, uy = DIRECTIONS[direction]
    return BoundingBox(x + ux * fraction * w, y + uy * fraction * h, w, h)


def scale_init(box, factor):
    """Rescale ``box`` about its centre."""
    if not factor > 0:
        raise ValueError(f"scale factor must be positive, got {factor}")
    b = BoundingBox(*box)
    cx, cy = b.center
    return BoundingBox.from_center(cx, cy, b.w * factor, b.h * factor)
