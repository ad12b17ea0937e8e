"""Command-line entry point.

Subcommands: ``analyze`` (CSV record to per-window CSV + JSON summary),
``synth`` (scenario to CSV), ``study-bivector``, ``study-fit`` and
``corpus``.  Exit status is 0 on success, 1 on usage errors and 2 on data
errors.
"""
from __future__ import annotations

import argparse
from collections import Counter
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import corpus, synth
from .classify import ClassifierConfig, FaultLabel, SeverityModel, classify
from .errors import GaFaultError, MalformedCsv
from .gac import EllipseParams, LineParams
from .pipeline import CircleParams, WindowConfig, analyze_arrays

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
SCHEMA = 1
WINDOW_COLUMNS = ["t_start", "b12", "b23", "b31", "shape", "a", "b", "theta", "degenerate", "label", "severity"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_atomic(path: str, text: str) -> None:
    """Write text to path through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------- ingestion

def read_record(path: str):
    """Parse ``t,va,vb,vc[,ia,ib,ic]``; returns (t, voltages, currents or None)."""
    try:
        with open(path, newline="") as fh:
            lines = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedCsv(f"cannot read {path}: {exc.strerror}") from exc
    if not lines:
        raise MalformedCsv("empty file", 1)
    header = [h.strip().lower() for h in lines[0]]
    if header not in (["t", "va", "vb", "vc"], ["t", "va", "vb", "vc", "ia", "ib", "ic"]):
        raise MalformedCsv(f"unexpected header {','.join(lines[0])!r}", 1)
    width = len(header)
    data = []
    for lineno, row in enumerate(lines[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise MalformedCsv(f"expected {width} fields, found {len(row)}", lineno)
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise MalformedCsv(f"non-numeric field in {','.join(row)!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise MalformedCsv("non-finite value", lineno)
        data.append(vals)
    if len(data) < 2:
        raise MalformedCsv("need at least two samples", len(lines))
    arr = np.array(data)
    if np.any(np.diff(arr[:, 0]) <= 0):
        bad = int(np.argmax(np.diff(arr[:, 0]) <= 0)) + 3
        raise MalformedCsv("time stamps not strictly increasing", bad)
    currents = arr[:, 4:7] if width == 7 else None
    return arr[:, 0], arr[:, 1:4], currents


# ------------------------------------------------------------------ analyze

def _shape_fields(shape):
    if isinstance(shape, EllipseParams):
        return "ellipse", shape.a, shape.b, shape.theta
    if isinstance(shape, LineParams):
        return "line", shape.half_length, 0.0, shape.angle
    if isinstance(shape, CircleParams):
        return "circle", shape.radius, shape.radius, 0.0
    raise TypeError(shape)


def analyze_channel(t, x, wcfg, ccfg, model):
    """Per-window rows and the channel summary."""
    rows, reports = [], []
    for w in analyze_arrays(t, x, wcfg):
        rep = classify(w, ccfg, model)
        reports.append((w, rep))
        name, a, b, theta = _shape_fields(w.shape)
        rows.append(
            [w.t_start, *w.bnorm, name, a, b, theta, w.degenerate, rep.label.value, rep.severity]
        )
    return rows, summarize_reports(reports)


def summarize_reports(reports) -> dict:
    """Dominant label over the faulted interval, onset and mean severity."""
    faulted = [(w, r) for w, r in reports if r.label is not FaultLabel.NONE]
    if not faulted:
        return {"label": "None", "onset": None, "mean_severity": None, "windows": len(reports)}
    counts = Counter(r.label.value for _, r in faulted)
    dominant = max(counts, key=lambda k: (counts[k], -list(counts).index(k)))
    sev = [r.severity for _, r in faulted if r.label.value == dominant and r.severity is not None]
    return {
        "label": dominant,
        "onset": faulted[0][0].t_start,
        "mean_severity": float(np.mean(sev)) if sev else None,
        "windows": len(reports),
        "label_counts": dict(sorted(counts.items())),
    }


def _window_config(args, fs) -> WindowConfig:
    return WindowConfig(
        f0=args.f0,
        fs=fs,
        window_fraction=args.window_fraction,
        hop=args.hop,
        degenerate_ratio=args.degenerate_ratio,
        smooth_width=args.smooth_width,
        nominal_amplitude=args.pu,
    )


def _classifier_config(args) -> ClassifierConfig:
    return ClassifierConfig(ground_epsilon=args.ground_epsilon, circle_rel_tol=args.circle_rel_tol)


def cmd_analyze(args) -> int:
    t, v, i = read_record(args.input)
    fs = args.fs if args.fs else round(1.0 / float(np.median(np.diff(t))), 6)
    try:
        wcfg = _window_config(args, fs)
        ccfg = _classifier_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    # with --pu the samples are in per unit, so the nominal peak is 1
    peak = 1.0 if args.pu else args.amplitude
    prefix = args.output
    summary = {"schema": SCHEMA, "input": os.path.basename(args.input), "fs": fs, "channels": {}}
    channels = [("voltage", v, peak)]
    if i is not None:
        channels.append(("current", i, 1.0 if args.pu else args.current_amplitude))
    for name, x, pk in channels:
        model = SeverityModel(A=pk / math.sqrt(2.0))
        rows, summ = analyze_channel(t, x, wcfg, ccfg, model)
        path = f"{prefix}_{name}.csv"
        write_atomic(path, _csv_text(WINDOW_COLUMNS, rows))
        summ["windows_csv"] = os.path.basename(path)
        summary["channels"][name] = summ
    write_atomic(f"{prefix}_summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    v_summ = summary["channels"]["voltage"]
    print(f"voltage: {v_summ['label']} onset={v_summ['onset']} severity={v_summ['mean_severity']}")
    return EXIT_OK


# -------------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    label = _parse_label(args.fault)
    if label is FaultLabel.NONE and args.severity > 0:
        raise UsageError("--severity needs a fault type other than none")
    if args.phase_shift and label.kind != "LL":
        raise UsageError("--phase-shift only applies to line-to-line faults")
    try:
        scn = synth.FaultScenario(
            label,
            args.severity,
            args.phase_shift,
            fault_time=args.fault_time,
            f0=args.f0,
            amplitude=args.amplitude,
            duration=args.duration,
            fs=args.fs,
            noise_std=args.noise,
            phase0=args.phase0,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    t, x = synth.generate_arrays(scn, args.seed)
    write_atomic(args.output, _csv_text(["t", "va", "vb", "vc"], ([float(a), *map(float, b)] for a, b in zip(t, x))))
    return EXIT_OK


def _parse_label(text) -> FaultLabel:
    try:
        return FaultLabel.parse(text)
    except ValueError:
        raise UsageError(f"unknown fault type {text!r}") from None


# ------------------------------------------------------------------ studies

def _write_table(table, path):
    write_atomic(path, _csv_text(table.header(), table.rows()))


def cmd_study_bivector(args) -> int:
    table = synth.bivector_error_study(tuple(args.noise), args.trials, args.seed)
    _write_table(table, args.output)
    return EXIT_OK


def cmd_study_fit(args) -> int:
    if any(not 0.0 < f <= 1.0 for f in args.fractions):
        raise UsageError("arc fractions must lie in (0, 1]")
    table = synth.fit_error_study(tuple(args.noise), tuple(args.fractions), args.trials, args.seed)
    _write_table(table, args.output)
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.noise > 0:
        results = corpus.run_cases(corpus.random_cases(args.trials, args.noise, args.seed))
    else:
        results = corpus.run_cases(corpus.grid_cases())
    rows = corpus.summarize(results)
    lines = [f"{'type':<5} {'cases':>5} {'accuracy':>9} {'sev_mae':>8}"]
    for r in rows:
        lines.append(f"{r.label.value:<5} {r.cases:>5} {r.accuracy:>9.4f} {r.severity_mae:>8.4f}")
    lines.append(f"{'all':<5} {len(results):>5} {corpus.accuracy(results):>9.4f}")
    print("\n".join(lines))
    if args.output:
        write_atomic(
            args.output,
            _csv_text(
                ["type", "cases", "accuracy", "severity_mae"],
                ([r.label.value, r.cases, r.accuracy, r.severity_mae] for r in rows),
            ),
        )
    return EXIT_OK


# ------------------------------------------------------------------- parser

def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get("GAFAULT_SEED", "0"))
    p = _Parser(prog="gafault", description="Geometric-algebra fault analysis of three-phase records.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyze a CSV record")
    a.add_argument("input")
    a.add_argument("-o", "--output", required=True, help="output prefix")
    a.add_argument("--f0", type=float, default=50.0)
    a.add_argument("--fs", type=float, default=None, help="sampling rate (default: from time stamps)")
    a.add_argument("--window-fraction", type=float, default=0.25)
    a.add_argument("--hop", type=int, default=1)
    a.add_argument("--degenerate-ratio", type=float, default=1e-3)
    a.add_argument("--smooth-width", type=int, default=0)
    a.add_argument("--pu", type=float, default=None, metavar="PEAK", help="divide samples by this nominal peak")
    a.add_argument("--amplitude", type=float, default=1.0, help="nominal voltage peak for severity")
    a.add_argument("--current-amplitude", type=float, default=1.0)
    a.add_argument("--ground-epsilon", type=float, default=0.01)
    a.add_argument("--circle-rel-tol", type=float, default=0.01)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synth", help="generate a synthetic record")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--fault", default="none")
    s.add_argument("--severity", type=float, default=0.0)
    s.add_argument("--phase-shift", type=float, default=0.0)
    s.add_argument("--fault-time", type=float, default=0.1)
    s.add_argument("--duration", type=float, default=0.2)
    s.add_argument("--f0", type=float, default=50.0)
    s.add_argument("--fs", type=float, default=10_000.0)
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--phase0", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=default_seed)
    s.set_defaults(func=cmd_synth)

    b = sub.add_parser("study-bivector", help="bivector error vs sample separation")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--noise", type=_floats, default=list(synth.BIVECTOR_NOISE))
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int, default=default_seed)
    b.set_defaults(func=cmd_study_bivector)

    f = sub.add_parser("study-fit", help="ellipse fit error vs arc fraction")
    f.add_argument("-o", "--output", required=True)
    f.add_argument("--noise", type=_floats, default=list(synth.FIT_NOISE))
    f.add_argument("--fractions", type=_floats, default=list(synth.FIT_FRACTIONS))
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=default_seed)
    f.set_defaults(func=cmd_study_fit)

    c = sub.add_parser("corpus", help="classification accuracy over the synthetic corpus")
    c.add_argument("-o", "--output", default=None, help="CSV of per-type results")
    c.add_argument("--noise", type=float, default=0.0)
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--seed", type=int, default=default_seed)
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"gafault: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GaFaultError, ValueError) as exc:
        print(f"gafault: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
