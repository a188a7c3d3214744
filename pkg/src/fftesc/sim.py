"""Closed-loop experiment runner."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np

from .controller import ExtremumSeekingController, Sense
from .design import DitherSet, validate_dithers, window_length
from .plants import Disturbance, PlantError, apply_disturbance, validate_schedule
from .spectral import FloatArray, GradientMethod, dft, detrend

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Generator(PCG64).standard_normal"
_NOISE_BLOCK = 4096


@dataclass(frozen=True)
class NoiseSpec:
    std: float
    seed: int

    def __post_init__(self) -> None:
        if not self.std >= 0:
            raise ValueError("noise std must be non-negative")


@dataclass
class Scenario:
    plant: Any
    dithers: DitherSet
    u0: tuple[float, ...]
    gains: tuple[float, ...]
    total_steps: int
    sense: Sense = Sense.MINIMIZE
    box: tuple[tuple[float, float], ...] | None = None
    n: int | None = None
    noise: NoiseSpec | None = None
    disturbances: tuple[Disturbance, ...] = ()
    spectrogram_stride: int | None = None
    method: GradientMethod = GradientMethod.AMPLITUDE_PHASE_SIGN

    @property
    def window(self) -> int:
        """Window length, resolved to the leakage-free minimum when unset."""
        return window_length(self.dithers, 1) if self.n is None else int(self.n)

    @property
    def stride(self) -> int:
        """Spectrogram stride, ``N // 4`` (at least 1) when unset."""
        if self.spectrogram_stride is not None:
            return int(self.spectrogram_stride)
        return max(1, self.window // 4)


@dataclass
class Trace:
    """Per-step record of one run.

    Row ``t`` holds the input applied at step ``t`` and the cost it produced.
    ``gradients[t]`` is the estimate that set ``nominal[t]``; it is NaN until
    the first full window, which makes row ``N`` the first with a gradient.
    Frame ``(t, amp)`` is the one-sided amplitude of the detrended cost
    window ``cost_noisy[t-N:t]`` that the controller used at that point.
    """

    n_points: int
    steps: FloatArray
    cost_raw: FloatArray
    cost_noisy: FloatArray
    nominal: FloatArray
    applied: FloatArray
    gradients: FloatArray
    frames: list[tuple[int, FloatArray]] = field(default_factory=list)
    failure: dict[str, Any] | None = None

    @property
    def n_rows(self) -> int:
        return int(self.steps.size)

    @property
    def bin_frequencies(self) -> FloatArray:
        return np.arange(self.n_points // 2 + 1) / self.n_points


def gaussian_noise(seed: int, std: float) -> Iterator[float]:
    """Endless reproducible stream of ``N(0, std**2)`` samples."""
    if not std >= 0:
        raise ValueError("noise std must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    while True:
        for x in rng.standard_normal(_NOISE_BLOCK) * std:
            yield float(x)


def build_controller(scenario: Scenario) -> ExtremumSeekingController:
    return ExtremumSeekingController(
        scenario.dithers,
        n=scenario.window,
        u0=scenario.u0,
        gains=scenario.gains,
        sense=scenario.sense,
        box=scenario.box,
        method=scenario.method,
    )


def run(scenario: Scenario) -> Trace:
    """Drive the plant with the extremum seeking loop for ``total_steps`` steps.

    A plant failure stops the run early; the returned trace then holds the
    rows completed so far and ``failure`` names the step.
    """
    n = scenario.window
    if scenario.total_steps < 1:
        raise ValueError("total_steps must be positive")
    if scenario.total_steps <= n:
        log.warning("%d steps never complete the %d-step warm-up", scenario.total_steps, n)
    for v in validate_dithers(scenario.dithers):
        log.warning("dither set: %s", v.describe(scenario.dithers.frequencies))
    validate_schedule(scenario.plant, scenario.disturbances)

    ctrl = build_controller(scenario)
    m = len(scenario.dithers)
    steps = scenario.total_steps
    stride = scenario.stride
    noise = gaussian_noise(scenario.noise.seed, scenario.noise.std) if scenario.noise else None

    cost_raw = np.empty(steps)
    cost_noisy = np.empty(steps)
    nominal = np.empty((steps, m))
    applied = np.empty((steps, m))
    grads = np.full((steps, m), np.nan)
    frames: list[tuple[int, FloatArray]] = []
    failure = None
    plant = scenario.plant
    done = 0

    for t in range(steps):
        plant = apply_disturbance(plant, scenario.disturbances, t)
        u = ctrl.applied
        try:
            raw = float(plant.cost(u))
        except (PlantError, ValueError) as exc:
            failure = {"step": t, "error": f"{type(exc).__name__}: {exc}"}
            log.error("run aborted at step %d: %s", t, exc)
            break
        noisy = raw + next(noise) if noise is not None else raw
        cost_raw[t] = raw
        cost_noisy[t] = noisy
        nominal[t] = ctrl.nominal
        applied[t] = u
        if ctrl.last_estimates is not None:
            grads[t] = [e.value for e in ctrl.last_estimates]
            if t % stride == 0:
                frames.append((t, ctrl.last_cost_spectrum.amplitude_single_sided))
        try:
            ctrl.step(noisy)
        except (ValueError, ArithmeticError) as exc:
            done = t + 1
            failure = {"step": t, "error": f"{type(exc).__name__}: {exc}"}
            log.error("run aborted at step %d: %s", t, exc)
            break
        done = t + 1

    return Trace(
        n_points=n,
        steps=np.arange(done, dtype=np.float64),
        cost_raw=cost_raw[:done],
        cost_noisy=cost_noisy[:done],
        nominal=nominal[:done],
        applied=applied[:done],
        gradients=grads[:done],
        frames=frames,
        failure=failure,
    )


def frame_at(cost: Sequence[float], n: int, step: int) -> FloatArray:
    """Amplitude spectrum of the detrended window ``cost[step-n:step]``."""
    if step < n or step > len(cost):
        raise ValueError(f"step {step} needs {n} earlier samples (have {len(cost)} rows)")
    window = np.asarray(cost[step - n : step], dtype=np.float64)
    return dft(detrend(window)).amplitude_single_sided


def spectrogram(trace: Trace) -> list[tuple[int, FloatArray]]:
    """Recompute the recorded spectrogram frames from the cost trace."""
    n = trace.n_points
    if trace.n_rows < n:
        return []
    return [(s, frame_at(trace.cost_noisy, n, s)) for s, _ in trace.frames]
