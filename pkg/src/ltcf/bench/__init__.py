"""Sequence ingestion, metrics, the one-pass evaluation runner and the CLI."""

from ltcf.bench.metrics import CurveReport, EvalResult, cle, curves, iou, scale_init, shift_init
from ltcf.bench.runner import run_ope, track_sequence
from ltcf.bench.sequence import Sequence, SequenceError, load_sequence

__all__ = [
    "CurveReport",
    "EvalResult",
    "Sequence",
    "SequenceError",
    "cle",
    "curves",
    "iou",
    "load_sequence",
    "run_ope",
    "scale_init",
    "shift_init",
    "track_sequence",
]
