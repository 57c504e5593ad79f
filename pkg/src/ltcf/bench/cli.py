"""Command-line entry point: ``ltcf {track,bench,synth,eval}``.

Log verbosity comes from the ``LTCF_LOG`` environment variable
(``DEBUG``, ``INFO``, ``WARNING``; default ``WARNING``).
"""

import argparse
import csv
import json
import logging
import os
import sys
from functools import partial
from pathlib import Path

from ltcf import synth
from ltcf.bench.metrics import DIRECTION_NAMES, EvalResult, curves, scale_init, shift_init
from ltcf.bench.runner import SUMMARY_KEYS, aggregate, report_to_dict, results_from_dict, run_ope, write_report
from ltcf.bench.sequence import GT_FILE, SequenceError, load_sequence
from ltcf.tracker import TrackerConfig

log = logging.getLogger("ltcf")

SHIFT_SCALES = (0.8, 0.9, 1.1, 1.2)


def _config(path):
    return TrackerConfig.from_file(path) if path else TrackerConfig()


def _format_summary(rows):
    lines = [f"{'sequence':<24}{'frames':>8}{'DP@20':>8}{'OS@0.5':>8}{'AUC':>8}{'CLE':>9}"]
    for name, n, s in rows:
        lines.append(f"{name:<24}{n:>8}{s['dp20']:>8.3f}{s['os50']:>8.3f}{s['auc']:>8.3f}{s['mean_cle']:>9.2f}")
    return "\n".join(lines)


def _print_report(report):
    rows = [(r.name, rep.n_frames, rep.summary()) for r, rep in zip(report.results, report.reports)]
    if report.reports:
        rows.append(("weighted average", sum(rep.n_frames for rep in report.reports), report.aggregate))
    print(_format_summary(rows))
    for name, message in sorted(report.errors.items()):
        print(f"FAILED {name}: {message}", file=sys.stderr)


def find_sequences(dataset_dir):
    root = Path(dataset_dir)
    if not root.is_dir():
        raise SequenceError(f"{root} is not a directory")
    found = sorted(p for p in root.iterdir() if (p / GT_FILE).is_file())
    if not found:
        raise SequenceError(f"no sequence directories with {GT_FILE} under {root}")
    return found


def cmd_track(args):
    seq = load_sequence(args.seq_dir)
    report = run_ope([seq], _config(args.config), timing=not args.no_timing)
    if report.errors:
        raise RuntimeError(report.errors[seq.name])
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report_to_dict(report), indent=1) + "\n")
    _print_report(report)
    print(f"wrote {out}")
    return 0


def _robustness_runs():
    for name, code in sorted(DIRECTION_NAMES.items(), key=lambda kv: kv[1]):
        yield f"shift_{name}", partial(shift_init, direction=code, fraction=0.1)
    for factor in SHIFT_SCALES:
        yield f"scale_{factor:g}", partial(scale_init, factor=factor)


def cmd_bench(args):
    sequences = find_sequences(args.dataset_dir)
    config = _config(args.config)
    out = Path(args.out)
    timing = not args.no_timing
    status = 0
    if args.ope or not args.shift_robustness:
        report = run_ope(sequences, config, args.workers, timing)
        write_report(report, out, "results")
        print("OPE")
        _print_report(report)
        status |= bool(report.errors)
    if args.shift_robustness:
        rows = []
        for name, init_fn in _robustness_runs():
            report = run_ope(sequences, config, args.workers, timing, init_fn=init_fn)
            write_report(report, out, name)
            status |= bool(report.errors)
            if report.reports:
                rows.append((name, sum(rep.n_frames for rep in report.reports), report.aggregate))
        with open(out / "robustness_summary.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["run", "frames", *SUMMARY_KEYS])
            for name, n, agg in rows:
                writer.writerow([name, n, *(agg[k] for k in SUMMARY_KEYS)])
        print("spatial robustness (weighted averages)")
        print(_format_summary(rows))
    print(f"wrote reports to {out}")
    return 1 if status else 0


def cmd_synth(args):
    if args.script:
        script = synth.load_script(args.script)
    else:
        script = synth.script_from_options(
            frames=args.frames,
            seed=args.seed,
            motion=args.motion,
            dx=args.dx,
            dy=args.dy,
            max_speed=args.max_speed,
            scale_rate=args.scale_rate,
            occlusion=args.occlusion,
            out_of_view=args.out_of_view,
            background=args.background,
        )
    seq = synth.generate(script, args.out_dir)
    print(f"wrote {len(seq)} frames to {args.out_dir}")
    return 0


def cmd_eval(args):
    doc = json.loads(Path(args.results).read_text())
    results = results_from_dict(doc)
    if args.data:
        # recompute per-frame errors from the stored boxes and fresh ground truth
        rebuilt = []
        for res in results:
            seq = load_sequence(Path(args.data) / res.name)
            rebuilt.append(EvalResult.from_boxes(res.name, res.boxes, seq.boxes, fps=res.fps))
        results = rebuilt
    reports = [curves(r) for r in results]
    rows = [(r.name, rep.n_frames, rep.summary()) for r, rep in zip(results, reports)]
    weighted, plain = aggregate(results, reports)
    total = sum(rep.n_frames for rep in reports)
    rows += [("weighted average", total, weighted), ("unweighted average", total, plain)]
    print(_format_summary(rows))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ltcf", description="Long-term correlation-filter tracker and benchmark tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="track one OTB-layout sequence")
    p.add_argument("seq_dir")
    p.add_argument("--out", default="results.json")
    p.add_argument("--config", help="key-value file of TrackerConfig fields")
    p.add_argument("--no-timing", action="store_true", help="omit fps so reruns are byte-identical")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("bench", help="evaluate every sequence under a dataset directory")
    p.add_argument("dataset_dir")
    p.add_argument("--ope", action="store_true", help="one-pass evaluation (the default)")
    p.add_argument("--shift-robustness", action="store_true", help="8 shifted and 4 rescaled initializations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="bench_out")
    p.add_argument("--config")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="generate a synthetic sequence")
    p.add_argument("out_dir")
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--motion", choices=("static", "constant", "random"), default="random")
    p.add_argument("--dx", type=int, default=0)
    p.add_argument("--dy", type=int, default=0)
    p.add_argument("--max-speed", type=int, default=5)
    p.add_argument("--scale-rate", type=float, default=1.0, help="per-frame size multiplier")
    p.add_argument("--occlusion", type=synth.parse_interval, action="append", default=[], metavar="A:B")
    p.add_argument("--out-of-view", type=synth.parse_interval, action="append", default=[], metavar="A:B")
    p.add_argument("--background", choices=synth.BACKGROUNDS, default="plain")
    p.add_argument("--script", help="key-value script file; overrides the other options")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="recompute curves from a stored results.json")
    p.add_argument("results")
    p.add_argument("--data", help="dataset directory to recompute errors from the stored boxes")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("LTCF_LOG", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SequenceError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
