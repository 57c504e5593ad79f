"""Axis-aligned boxes ``(x, y, w, h)`` with a top-left origin, in pixels."""

import math
from typing import NamedTuple


class BoundingBox(NamedTuple):
    x: float
    y: float
    w: float
    h: float

    @property
    def center(self):
        return self.x + self.w / 2.0, self.y + self.h / 2.0

    @classmethod
    def from_center(cls, cx, cy, w, h):
        return cls(cx - w / 2.0, cy - h / 2.0, w, h)

    def validate(self):
        if not (self.w > 0 and self.h > 0) or not all(map(math.isfinite, self)):
            raise ValueError(f"box must be finite with positive size, got {tuple(self)}")
        return self


def iou(a, b):
    """Intersection over union of two boxes with positive area."""
    a, b = BoundingBox(*a).validate(), BoundingBox(*b).validate()
    iw = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    ih = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = iw * ih
    return inter / (a.w * a.h + b.w * b.h - inter)


def cle(a, b):
    """Euclidean distance between box centres."""
    (ax, ay), (bx, by) = BoundingBox(*a).center, BoundingBox(*b).center
    return math.hypot(ax - bx, ay - by)
