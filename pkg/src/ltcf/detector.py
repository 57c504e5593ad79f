"""Online linear SVM for re-detection, trained with passive-aggressive steps."""

from dataclasses import dataclass

import numpy as np

from ltcf.boxes import iou
from ltcf.features import lab_histogram_from_lab, to_lab

POSITIVE_IOU = 0.5
NEGATIVE_IOU = 0.1


@dataclass(frozen=True)
class SvmModel:
    h: np.ndarray
    tau: float = 1.0
    lambda_svm: float = 1e-4  # weight of ||h||^2 in the objective; PA steps ignore it

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @classmethod
    def zeros(cls, dim, tau=1.0, lambda_svm=1e-4):
        return cls(np.zeros(dim), tau, lambda_svm)

    @property
    def trained(self):
        return bool(np.any(self.h))

    def score(self, v):
        return float(np.dot(self.h, v))


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: int
    iou_with_target: float
    box: tuple = None


@dataclass(frozen=True)
class Candidate:
    box: tuple
    svm_score: float


def hinge_loss(model, v, c):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != model.h.shape:
        raise ValueError(f"feature dim {v.shape} does not match hyperplane {model.h.shape}")
    return max(0.0, 1.0 - c * float(np.dot(model.h, v)))


def objective(model, samples):
    """Regularized mean hinge loss of ``model`` over ``samples``."""
    losses = [hinge_loss(model, s.features, s.label) for s in samples]
    return 0.5 * model.lambda_svm * float(model.h @ model.h) + float(np.mean(losses))


def pa_update(model, sample):
    """One passive-aggressive step: ``h <- h - l / (||grad||^2 + 1/(2 tau)) * grad``.

    The gradient of the hinge loss is ``-c v`` whenever the loss is positive;
    zero-loss samples return ``model`` itself.
    """
    v = np.asarray(sample.features, dtype=np.float64)
    loss = hinge_loss(model, v, sample.label)
    if loss == 0.0:
        return model
    step = loss / (float(v @ v) + 1.0 / (2.0 * model.tau))
    return SvmModel(model.h + step * sample.label * v, model.tau, model.lambda_svm)


def train_svm(model, samples, rng=None):
    """Sequential PA updates over ``samples`` in a (seeded) shuffled order."""
    order = np.arange(len(samples))
    if rng is not None:
        rng.shuffle(order)
    for i in order:
        model = pa_update(model, samples[i])
    return model


def default_train_stride(box_size):
    return max(2, int(round(0.1 * min(box_size))))


def default_detect_stride(frame_shape):
    return max(4, int(round(0.05 * min(frame_shape[:2]))))


def _window_boxes(frame_shape, size, x_range, y_range):
    H, W = frame_shape[:2]
    w, h = size
    boxes = []
    for y in y_range:
        for x in x_range:
            if x >= 0 and y >= 0 and x + w <= W and y + h <= H:
                boxes.append((x, y, w, h))
    return boxes


def generate_samples(frame, target_box, search_extent=2.0, stride=None, lab=None, rank_radius=1):
    """Label translated copies of ``target_box`` by their overlap with it.

    Sample centres lie on a ``stride`` grid inside a window of
    ``search_extent`` times the target size centred on the target. IoU above
    0.5 gives +1, below 0.1 gives -1, anything between is dropped. Samples
    that would leave the frame are skipped.
    """
    x, y, w, h = (int(round(v)) for v in target_box)
    if w < 1 or h < 1:
        raise ValueError(f"target box must have positive size, got {target_box}")
    stride = stride or default_train_stride((w, h))
    lab = to_lab(frame) if lab is None else lab
    kx = int((search_extent / 2.0) * w // stride)
    ky = int((search_extent / 2.0) * h // stride)
    xs = [x + i * stride for i in range(-kx, kx + 1)]
    ys = [y + j * stride for j in range(-ky, ky + 1)]
    samples = []
    for box in _window_boxes(lab.shape, (w, h), xs, ys):
        overlap = iou(box, (x, y, w, h))
        if overlap > POSITIVE_IOU:
            label = 1
        elif overlap < NEGATIVE_IOU:
            label = -1
        else:
            continue
        bx, by = box[0], box[1]
        feat = lab_histogram_from_lab(lab[by : by + h, bx : bx + w], rank_radius=rank_radius)
        samples.append(LabeledSample(feat, label, overlap, box))
    return samples


def detect(frame, model, box_size, stride=None, lab=None, rank_radius=1):
    """Slide a ``box_size`` window over the whole frame; keep windows scoring above 0.

    Candidates come back sorted by descending SVM score. An untrained
    (all-zero) model yields no candidates.
    """
    if not model.trained:
        return []
    w, h = (int(round(v)) for v in box_size)
    lab = to_lab(frame) if lab is None else lab
    H, W = lab.shape[:2]
    stride = stride or default_detect_stride(lab.shape)
    boxes = _window_boxes(lab.shape, (w, h), range(0, W - w + 1, stride), range(0, H - h + 1, stride))
    candidates = []
    for box in boxes:
        bx, by = box[0], box[1]
        score = model.score(lab_histogram_from_lab(lab[by : by + h, bx : bx + w], rank_radius=rank_radius))
        if score > 0:
            candidates.append(Candidate(box, score))
    candidates.sort(key=lambda c: -c.svm_score)
    return candidates
