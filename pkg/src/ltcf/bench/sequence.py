"""OTB directory layout: ``<seq>/img/0001.jpg ...`` plus ``<seq>/groundtruth_rect.txt``."""

import re
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")
GT_FILE = "groundtruth_rect.txt"


class SequenceError(ValueError):
    pass


@dataclass
class Sequence:
    name: str
    frames: list
    boxes: np.ndarray  # (n, 4) 0-based x, y, w, h; NaN rows mark absent targets
    attributes: list = field(default_factory=list)

    def __len__(self):
        return len(self.frames)

    def read_frame(self, index):
        return read_image(self.frames[index])

    def present(self, index):
        return bool(np.all(np.isfinite(self.boxes[index])) and np.all(self.boxes[index][2:] > 0))


def read_image(path):
    """Load an image as float RGB (or gray) in [0, 1]."""
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise SequenceError(f"cannot decode image {path}")
    if img.ndim == 3:
        img = cv2.cvtColor(img[..., :3], cv2.COLOR_BGR2RGB)
    scale = 65535.0 if img.dtype == np.uint16 else 255.0
    return img.astype(np.float64) / scale


def _frame_key(path):
    digits = re.findall(r"\d+", path.stem)
    return (int(digits[-1]) if digits else -1, path.name)


def parse_groundtruth(text, source=GT_FILE):
    """Parse ``x,y,w,h`` rows (comma, tab or space separated), 1-based, into 0-based boxes."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\t ]+", line) if p]
        if len(parts) != 4:
            raise SequenceError(f"{source}:{lineno}: expected 4 values, got {raw!r}")
        try:
            x, y, w, h = (float(p) for p in parts)
        except ValueError:
            raise SequenceError(f"{source}:{lineno}: unparsable box {raw!r}") from None
        if not (w > 0 and h > 0):
            rows.append((np.nan,) * 4)
        else:
            rows.append((x - 1.0, y - 1.0, w, h))
    return np.array(rows, dtype=np.float64).reshape(-1, 4)


def load_sequence(path):
    path = Path(path)
    img_dir = path / "img"
    gt_path = path / GT_FILE
    if not img_dir.is_dir():
        raise SequenceError(f"{path}: missing img/ directory")
    if not gt_path.is_file():
        raise SequenceError(f"{path}: missing {GT_FILE}")
    frames = sorted((p for p in img_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES), key=_frame_key)
    if not frames:
        raise SequenceError(f"{img_dir}: no frames")
    boxes = parse_groundtruth(gt_path.read_text(), str(gt_path))
    if len(boxes) != len(frames):
        raise SequenceError(f"{path}: {len(frames)} frames but {len(boxes)} ground-truth boxes")
    if not np.all(np.isfinite(boxes[0])):
        raise SequenceError(f"{gt_path}: first ground-truth box must be valid")
    attributes = []
    attr_path = path / "attributes.txt"
    if attr_path.is_file():
        attributes = [a.strip() for a in re.split(r"[,\n]", attr_path.read_text()) if a.strip()]
    return Sequence(path.name, frames, boxes, attributes)
