"""Command-line front end: ``fftesc design | run | spectrum``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .design import design_report
from .scenario import ScenarioError, ScenarioFile, load
from .sim import RNG_ALGORITHM, NoiseSpec, frame_at, run
from .tracefiles import read_trace_columns, write_frame, write_spectrogram, write_trace

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNINGS = 2
EXIT_RUN_FAILED = 3


def cmd_design(args: argparse.Namespace) -> int:
    try:
        sf = load(args.config)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sc = sf.scenario
    report = design_report(sc.dithers, sf.map_bounds, sc.window)
    freqs = sc.dithers.frequencies
    print(f"channels: {len(freqs)}")
    print("frequencies: " + ", ".join(str(f) for f in freqs))
    print(f"N_min: {report.n_min}")
    print(f"N: {report.n_used}")
    if report.n_used % report.n_min:
        print(f"warning: N = {report.n_used} is not a multiple of N_min; dither bins will leak")
    if report.gain_bounds is not None:
        for i, (k, g) in enumerate(zip(report.gain_bounds, sc.gains), start=1):
            inside = "inside" if 0 < g < k else "OUTSIDE"
            print(f"gain interval ch {i}: (0, {k:.6g})  configured {g:.6g} {inside}")
    if not report.violations:
        print("violations: none")
        return EXIT_OK
    print(f"violations: {len(report.violations)}")
    for v in report.violations:
        print("warning: " + v.describe(freqs))
    return EXIT_WARNINGS


def _meta(sf: ScenarioFile, status: str, rows: int, failure: dict | None) -> dict:
    sc = sf.scenario
    return {
        "software": {"name": "fftesc", "version": __version__, "numpy": np.__version__},
        "status": status,
        "rows": rows,
        "failure": failure,
        "N": sc.window,
        "rng": {
            "algorithm": RNG_ALGORITHM,
            "seed": sc.noise.seed if sc.noise else None,
        },
        "defaults_applied": sf.defaults_applied,
        "config": sf.to_dict(),
    }


def cmd_run(args: argparse.Namespace) -> int:
    try:
        sf = load(args.config)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sc = sf.scenario
    if args.seed is not None:
        if sc.noise is None:
            print("error: --seed given but the scenario has no noise section", file=sys.stderr)
            return EXIT_ERROR
        sc.noise = NoiseSpec(sc.noise.std, args.seed)
    if args.steps is not None:
        if args.steps < 1:
            print("error: --steps must be positive", file=sys.stderr)
            return EXIT_ERROR
        sc.total_steps = args.steps
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trace = run(sc)
    with open(out / "trace.csv", "w", newline="") as fh:
        write_trace(trace, fh)
    with open(out / "spectrogram.csv", "w", newline="") as fh:
        write_spectrogram(trace.frames, trace.n_points, fh)
    status = "ok" if trace.failure is None else "failed"
    meta = _meta(sf, status, trace.n_rows, trace.failure)
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    if trace.failure is not None:
        print(f"error: run aborted at step {trace.failure['step']}: {trace.failure['error']}",
              file=sys.stderr)
        return EXIT_RUN_FAILED
    last = trace.n_rows - 1
    print(f"rows: {trace.n_rows}  N: {trace.n_points}  frames: {len(trace.frames)}")
    print(f"final cost: {float(trace.cost_raw[last])!r}")
    print("final u: " + ", ".join(repr(float(x)) for x in trace.nominal[last]))
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    trace_path = Path(args.trace)
    try:
        cols = read_trace_columns(trace_path)
    except (OSError, ValueError, StopIteration) as exc:
        print(f"error: cannot read {trace_path}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    n = args.n
    if n is None:
        meta = trace_path.with_name("meta.json")
        if meta.exists():
            n = int(json.loads(meta.read_text())["N"])
        else:
            grads = cols.get("grad_1", [])
            n = next((i for i, g in enumerate(grads) if not math.isnan(g)), None)
            if n is None:
                print("error: window length unknown; pass --n", file=sys.stderr)
                return EXIT_ERROR
    try:
        amp = frame_at(cols["cost_noisy"], n, args.step)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_frame(amp, n, fh)
    else:
        write_frame(amp, n, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fftesc", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings from the run")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="print window length, gain intervals and dither warnings")
    d.add_argument("--config", required=True, metavar="PATH")
    d.set_defaults(func=cmd_design)

    r = sub.add_parser("run", help="run a scenario and write trace.csv, spectrogram.csv, meta.json")
    r.add_argument("--config", required=True, metavar="PATH")
    r.add_argument("--out", required=True, metavar="DIR")
    r.add_argument("--seed", type=int, default=None, help="override the noise seed")
    r.add_argument("--steps", type=int, default=None, help="override run.steps")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("spectrum", help="amplitude spectrum of the cost window before STEP")
    s.add_argument("trace", metavar="TRACE_CSV")
    s.add_argument("--step", type=int, required=True)
    s.add_argument("--n", type=int, default=None, help="window length (default: from meta.json)")
    s.add_argument("--out", default=None, metavar="FILE")
    s.set_defaults(func=cmd_spectrum)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
