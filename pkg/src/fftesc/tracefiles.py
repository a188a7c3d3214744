"""CSV serialization of traces and spectrogram frames.

Floats are written with ``repr`` so every value round-trips exactly and
reruns produce byte-identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .sim import Trace


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def trace_header(m: int) -> list[str]:
    return (
        ["step", "cost_raw", "cost_noisy"]
        + [f"u_{i}" for i in range(1, m + 1)]
        + [f"applied_{i}" for i in range(1, m + 1)]
        + [f"grad_{i}" for i in range(1, m + 1)]
    )


def write_trace(trace: Trace, fh: TextIO) -> None:
    m = trace.nominal.shape[1]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(trace_header(m))
    for t in range(trace.n_rows):
        w.writerow(
            [str(t), _fmt(trace.cost_raw[t]), _fmt(trace.cost_noisy[t])]
            + [_fmt(x) for x in trace.nominal[t]]
            + [_fmt(x) for x in trace.applied[t]]
            + [_fmt(x) for x in trace.gradients[t]]
        )


def write_spectrogram(
    frames: Sequence[tuple[int, np.ndarray]], n_points: int, fh: TextIO
) -> None:
    """Long format: one ``step, bin_freq, amplitude`` row per bin per frame."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "bin_freq", "amplitude"])
    freqs = [repr(l / n_points) for l in range(n_points // 2 + 1)]
    for step, amp in frames:
        s = str(step)
        for f, a in zip(freqs, amp):
            w.writerow([s, f, repr(float(a))])


def write_frame(amp: np.ndarray, n_points: int, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["bin_freq", "amplitude"])
    for l, a in enumerate(amp):
        w.writerow([repr(l / n_points), repr(float(a))])


def read_trace_columns(path: str | Path) -> dict[str, list[float]]:
    """Columns of a trace CSV; empty cells become NaN."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[float]] = {h: [] for h in header}
        for row in reader:
            for h, cell in zip(header, row):
                cols[h].append(float(cell) if cell else math.nan)
    return cols
