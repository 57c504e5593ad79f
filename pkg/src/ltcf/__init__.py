"""Long-term correlation-filter tracking toolkit.

Three kernelized correlation filters (translation, scale, long-term memory)
with confidence-gated SVM re-detection, plus an OTB-style benchmark harness
and a synthetic sequence generator.
"""

from ltcf.tracker import BoundingBox, StepDiagnostics, TrackerConfig, TrackerState
from ltcf.tracker import confidence, init, step

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "StepDiagnostics",
    "TrackerConfig",
    "TrackerState",
    "confidence",
    "init",
    "step",
]
