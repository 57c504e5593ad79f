"""Deterministic synthetic sequences in the OTB layout.

A seeded block texture moves over a background following a scripted path.
Occlusion intervals cover the target with a second textured patch;
out-of-view intervals move it past the right edge of the frame. Intervals are
``a:b`` with 0-based frame indices, ``a`` inclusive and ``b`` exclusive.
"""

from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from ltcf.bench.sequence import GT_FILE, load_sequence
from ltcf.kvconfig import parse_kv

BACKGROUNDS = ("plain", "textured", "clutter")


def parse_interval(text):
    a, b = (int(v) for v in text.split(":"))
    if a < 0 or b <= a:
        raise ValueError(f"interval must be a:b with 0 <= a < b, got {text!r}")
    return a, b


@dataclass(frozen=True)
class SynthScript:
    motion: tuple  # per-frame (dx, dy) in pixels; entry 0 is ignored
    scale: tuple = None  # per-frame size multiplier; None means constant size
    frame_size: tuple = (320, 240)
    target_size: tuple = (40, 40)
    start: tuple = None  # top-left of the first box; defaults to the frame centre
    occlusions: tuple = ()
    out_of_view: tuple = ()
    background: str = "plain"
    texture_seed: int = 0
    occluder_seed: int = 1
    occluder_margin: int = 4
    color: bool = True

    def __post_init__(self):
        n = len(self.motion)
        if n < 1:
            raise ValueError("a script needs at least one frame")
        if self.scale is not None and (len(self.scale) != n or min(self.scale) <= 0):
            raise ValueError("scale multipliers must be positive, one per frame")
        for a, b in tuple(self.occlusions) + tuple(self.out_of_view):
            if not 0 <= a < b <= n:
                raise ValueError(f"interval {a}:{b} outside the {n}-frame script")
        if self.background not in BACKGROUNDS:
            raise ValueError(f"background must be one of {BACKGROUNDS}, got {self.background!r}")

    @property
    def num_frames(self):
        return len(self.motion)

    @classmethod
    def static(cls, frames, **kwargs):
        return cls(motion=((0, 0),) * frames, **kwargs)

    @classmethod
    def constant(cls, frames, dx, dy, **kwargs):
        return cls(motion=((0, 0),) + ((dx, dy),) * (frames - 1), **kwargs)

    @classmethod
    def random_walk(cls, frames, seed=0, max_speed=5, hold=20, **kwargs):
        """Piecewise-constant integer velocity, redrawn every ``hold`` frames.

        Each axis moves at most ``max_speed`` px/frame and bounces off the
        frame border, so the box never leaves the frame.
        """
        rng = np.random.default_rng(seed)
        W, H = kwargs.get("frame_size", cls.frame_size)
        w, h = kwargs.get("target_size", cls.target_size)
        x, y = kwargs.get("start") or ((W - w) // 2, (H - h) // 2)
        vx = vy = 0
        motion = [(0, 0)]
        for i in range(1, frames):
            if (i - 1) % hold == 0:
                vx, vy = (int(v) for v in rng.integers(-max_speed, max_speed + 1, size=2))
            if not 0 <= x + vx <= W - w:
                vx = -vx
            if not 0 <= y + vy <= H - h:
                vy = -vy
            x, y = x + vx, y + vy
            motion.append((vx, vy))
        return cls(motion=tuple(motion), **kwargs)

    def in_intervals(self, i, intervals):
        return any(a <= i < b for a, b in intervals)

    def boxes(self):
        """Integer ground-truth boxes ``(x, y, w, h)``, one per frame."""
        W, H = self.frame_size
        w, h = (float(v) for v in self.target_size)
        x, y = self.start or ((W - self.target_size[0]) // 2, (H - self.target_size[1]) // 2)
        out = []
        for i, (dx, dy) in enumerate(self.motion):
            if i > 0:
                if self.scale is not None:
                    cx, cy = x + w / 2, y + h / 2
                    w, h = w * self.scale[i], h * self.scale[i]
                    x, y = cx - w / 2, cy - h / 2
                x, y = x + dx, y + dy
            bw = int(np.clip(round(w), 1, W))
            bh = int(np.clip(round(h), 1, H))
            x, y = float(np.clip(x, 0, W - bw)), float(np.clip(y, 0, H - bh))
            bx, by = int(round(x)), int(round(y))
            if self.in_intervals(i, self.out_of_view):
                out.append((W + self.occluder_margin, by, bw, bh))
            else:
                out.append((bx, by, bw, bh))
        return out


def make_texture(size, seed, color=True, blocks=8):
    """Seeded random block texture, smoothed once; ``size=(w, h)``."""
    rng = np.random.default_rng(seed)
    channels = 3 if color else 1
    grid = rng.uniform(0.05, 0.95, size=(blocks, blocks, channels)).astype(np.float32)
    w, h = size
    tex = cv2.resize(grid, (w, h), interpolation=cv2.INTER_NEAREST)
    tex = cv2.GaussianBlur(tex, (3, 3), 0)
    return tex.reshape(h, w, channels)


def _background(script):
    W, H = script.frame_size
    channels = 3 if script.color else 1
    base = np.empty((H, W, channels), np.float32)
    base[...] = np.array([0.42, 0.50, 0.56][:channels], np.float32)
    if script.background == "textured":
        rng = np.random.default_rng(script.texture_seed + 1000)
        noise = rng.normal(0.0, 0.04, size=(H // 8 + 1, W // 8 + 1, channels)).astype(np.float32)
        noise = cv2.resize(noise, (W, H), interpolation=cv2.INTER_LINEAR).reshape(H, W, channels)
        base = np.clip(base + noise, 0, 1)
    elif script.background == "clutter":
        rng = np.random.default_rng(script.texture_seed + 2000)
        tw, th = script.target_size
        for k in range(4):
            px = int(rng.integers(0, max(1, W - tw)))
            py = int(rng.integers(0, max(1, H - th)))
            _paste(base, make_texture((tw, th), script.texture_seed + 100 + k, script.color), px, py)
    return base


def _paste(canvas, patch, x, y):
    H, W = canvas.shape[:2]
    h, w = patch.shape[:2]
    x0, y0, x1, y1 = max(0, x), max(0, y), min(W, x + w), min(H, y + h)
    if x1 > x0 and y1 > y0:
        canvas[y0:y1, x0:x1] = patch[y0 - y : y1 - y, x0 - x : x1 - x]


def render(script):
    """Yield ``(frame, box)`` pairs; frames are float32 in [0, 1]."""
    background = _background(script)
    texture = make_texture(script.target_size, script.texture_seed, script.color)
    channels = texture.shape[2]
    m = script.occluder_margin
    for i, box in enumerate(script.boxes()):
        frame = background.copy()
        x, y, w, h = box
        if (w, h) == tuple(script.target_size):
            patch = texture
        else:
            patch = cv2.resize(texture, (w, h), interpolation=cv2.INTER_LINEAR).reshape(h, w, channels)
        _paste(frame, patch, x, y)
        if script.in_intervals(i, script.occlusions):
            cover = make_texture((w + 2 * m, h + 2 * m), script.occluder_seed, script.color)
            _paste(frame, cover, x - m, y - m)
        yield frame, box


def generate(script, out_dir):
    """Write ``img/0001.png ...`` and ``groundtruth_rect.txt``; return the loaded Sequence."""
    out_dir = Path(out_dir)
    img_dir = out_dir / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, (frame, (x, y, w, h)) in enumerate(render(script)):
        pixels = np.round(frame * 255.0).astype(np.uint8)
        if pixels.shape[2] == 3:
            pixels = cv2.cvtColor(pixels, cv2.COLOR_RGB2BGR)
        path = img_dir / f"{i + 1:04d}.png"
        if not cv2.imwrite(str(path), pixels):
            raise OSError(f"cannot write {path}")
        lines.append(f"{x + 1},{y + 1},{w},{h}")
    (out_dir / GT_FILE).write_text("\n".join(lines) + "\n")
    return load_sequence(out_dir)


def script_from_options(
    frames=100,
    seed=0,
    motion="random",
    dx=0,
    dy=0,
    max_speed=5,
    scale_rate=1.0,
    occlusion=(),
    out_of_view=(),
    **kwargs,
):
    """Build a script from CLI-style options; ``seed`` drives motion and textures."""
    kwargs.setdefault("texture_seed", seed)
    kwargs.setdefault("occluder_seed", seed + 1)
    if scale_rate != 1.0:
        kwargs["scale"] = (1.0,) + (float(scale_rate),) * (frames - 1)
    kwargs["occlusions"] = tuple(occlusion)
    kwargs["out_of_view"] = tuple(out_of_view)
    if motion == "static":
        return SynthScript.static(frames, **kwargs)
    if motion == "constant":
        return SynthScript.constant(frames, dx, dy, **kwargs)
    if motion == "random":
        return SynthScript.random_walk(frames, seed=seed, max_speed=max_speed, **kwargs)
    raise ValueError(f"motion must be static, constant or random, got {motion!r}")


_SCRIPT_KEYS = {
    "frames": int,
    "seed": int,
    "motion": str,
    "dx": int,
    "dy": int,
    "max_speed": int,
    "scale_rate": float,
    "background": str,
    "texture_seed": int,
    "occluder_seed": int,
    "occluder_margin": int,
    "color": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def load_script(path):
    """Read a key-value script file (``occlusion = 50:70, 120:130`` style intervals)."""
    path = Path(path)
    values = parse_kv(path.read_text(), str(path))
    kwargs = {}
    for key, raw in values.items():
        if key in ("occlusion", "out_of_view"):
            kwargs[key] = tuple(parse_interval(p.strip()) for p in raw.split(",") if p.strip())
        elif key in ("frame_size", "target_size", "start"):
            kwargs[key] = tuple(int(v) for v in raw.replace("x", ",").split(","))
        elif key in _SCRIPT_KEYS:
            kwargs[key] = _SCRIPT_KEYS[key](raw)
        else:
            raise ValueError(f"{path}: unknown key {key!r}")
    return script_from_options(**kwargs)
