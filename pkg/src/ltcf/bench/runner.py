"""One-pass evaluation: run the tracker over sequences and assemble reports."""

import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ltcf import tracker
from ltcf.bench.metrics import EvalResult, curves
from ltcf.bench.sequence import Sequence, load_sequence

log = logging.getLogger(__name__)

SUMMARY_KEYS = ("dp20", "os50", "auc", "mean_cle")


@dataclass
class OpeReport:
    run_id: str
    config: dict
    results: list  # EvalResult per sequence, sorted by name
    reports: list  # CurveReport per sequence, same order
    aggregate: dict  # frame-weighted
    aggregate_unweighted: dict
    errors: dict = field(default_factory=dict)  # sequence name -> message


def track_sequence(seq, config=None, init_box=None, timing=True):
    """Track ``seq`` from its first ground-truth box (or ``init_box``), never resetting."""
    config = config or tracker.TrackerConfig()
    if isinstance(seq, (str, Path)):
        seq = load_sequence(seq)
    box0 = tuple(seq.boxes[0]) if init_box is None else tuple(init_box)
    n = len(seq)
    boxes = np.zeros((n, 4))
    conf = np.zeros(n)
    redetected = np.zeros(n, dtype=bool)

    frame = seq.read_frame(0)
    start = time.perf_counter()
    state = tracker.init(frame, box0, config)
    boxes[0] = box0
    conf[0] = tracker.confidence(state, box0, frame)
    for i in range(1, n):
        box, diag = tracker.step(state, seq.read_frame(i))
        boxes[i] = box
        conf[i] = diag.confidence
        redetected[i] = diag.redetection_accepted
    elapsed = time.perf_counter() - start
    fps = n / elapsed if timing and elapsed > 0 else None
    return EvalResult.from_boxes(seq.name, boxes, seq.boxes, confidence=conf, redetected=redetected, fps=fps)


def _job(args):
    source, config, init_fn, timing = args
    seq = source if isinstance(source, Sequence) else load_sequence(source)
    init_box = init_fn(seq.boxes[0]) if init_fn is not None else None
    return track_sequence(seq, config, init_box, timing)


def aggregate(results, reports):
    """Frame-weighted and plain means of the per-sequence summaries."""
    weights = np.array([r.n_frames for r in reports], dtype=np.float64)
    weighted, plain = {}, {}
    for key in SUMMARY_KEYS:
        values = np.array([getattr(r, key) for r in reports])
        weighted[key] = float(np.dot(weights, values) / weights.sum())
        plain[key] = float(values.mean())
    return weighted, plain


def make_run_id(config, names):
    blob = json.dumps({"config": dataclasses.asdict(config), "sequences": sorted(names)}, sort_keys=True)
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


def run_ope(sequences, config=None, workers=1, timing=True, init_fn=None):
    """Evaluate every sequence once; failures are logged and reported, not raised."""
    config = config or tracker.TrackerConfig()
    jobs = [(s, config, init_fn, timing) for s in sequences]
    names = [s.name if isinstance(s, Sequence) else Path(s).name for s in sequences]
    results, errors = [], {}
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_job, job) for job in jobs]
            outcomes = []
            for name, fut in zip(names, futures):
                try:
                    outcomes.append(fut.result())
                except Exception as exc:  # one bad sequence must not stop the run
                    outcomes.append(exc)
    else:
        outcomes = []
        for job in jobs:
            try:
                outcomes.append(_job(job))
            except Exception as exc:
                outcomes.append(exc)
    for name, outcome in zip(names, outcomes):
        if isinstance(outcome, Exception):
            log.error("sequence %s failed: %s", name, outcome)
            errors[name] = str(outcome)
        else:
            results.append(outcome)
    results.sort(key=lambda r: r.name)
    reports = [curves(r) for r in results]
    if reports:
        weighted, plain = aggregate(results, reports)
    else:
        weighted = plain = {key: None for key in SUMMARY_KEYS}
    return OpeReport(
        make_run_id(config, names), dataclasses.asdict(config), results, reports, weighted, plain, errors
    )


def _num(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def report_to_dict(report):
    per_sequence = []
    for res, rep in zip(report.results, report.reports):
        frames = []
        for i in range(len(res.boxes)):
            frames.append(
                {
                    "frame": i,
                    "box": [float(v) for v in res.boxes[i]],
                    "cle": _num(res.cle[i]),
                    "iou": _num(res.iou[i]),
                    "confidence": _num(res.confidence[i]) if res.confidence is not None else None,
                    "redetected": bool(res.redetected[i]) if res.redetected is not None else False,
                }
            )
        per_sequence.append(
            {
                "name": res.name,
                "dp20": rep.dp20,
                "os50": rep.os50,
                "auc": rep.auc,
                "mean_cle": rep.mean_cle,
                "fps": _num(res.fps),
                "per_frame": frames,
            }
        )
    return {
        "run_id": report.run_id,
        "config": report.config,
        "per_sequence": per_sequence,
        "aggregate": {k: _num(report.aggregate[k]) for k in SUMMARY_KEYS},
    }


def results_from_dict(doc):
    """Rebuild EvalResults from a stored report (boxes and per-frame errors)."""
    results = []
    for seq in doc["per_sequence"]:
        frames = seq["per_frame"]
        nan = float("nan")
        results.append(
            EvalResult(
                seq["name"],
                np.array([f["box"] for f in frames], dtype=np.float64).reshape(-1, 4),
                np.array([nan if f["cle"] is None else f["cle"] for f in frames]),
                np.array([nan if f["iou"] is None else f["iou"] for f in frames]),
                confidence=np.array([nan if f["confidence"] is None else f["confidence"] for f in frames]),
                redetected=np.array([bool(f["redetected"]) for f in frames]),
                fps=seq.get("fps"),
            )
        )
    return results


def write_report(report, out_dir, stem="results"):
    """Write ``<stem>.json``, a per-frame CSV and a per-sequence summary CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = report_to_dict(report)
    json_path = out_dir / f"{stem}.json"
    json_path.write_text(json.dumps(doc, indent=1) + "\n")
    with open(out_dir / f"{stem}_frames.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence", "frame", "x", "y", "w", "h", "cle", "iou", "confidence", "redetected"])
        for seq in doc["per_sequence"]:
            for f in seq["per_frame"]:
                writer.writerow([seq["name"], f["frame"], *f["box"], f["cle"], f["iou"], f["confidence"], int(f["redetected"])])
    with open(out_dir / f"{stem}_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sequence", "frames", *SUMMARY_KEYS, "fps"])
        for res, rep in zip(report.results, report.reports):
            writer.writerow([res.name, rep.n_frames, rep.dp20, rep.os50, rep.auc, rep.mean_cle, _num(res.fps)])
        total = sum(rep.n_frames for rep in report.reports)
        writer.writerow(["weighted_average", total, *(report.aggregate[k] for k in SUMMARY_KEYS), ""])
        writer.writerow(["unweighted_average", total, *(report.aggregate_unweighted[k] for k in SUMMARY_KEYS), ""])
    return json_path
