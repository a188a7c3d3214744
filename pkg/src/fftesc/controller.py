"""Multivariable extremum seeking loop driven by sliding-window FFTs."""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

from .design import DitherSet
from .spectral import (
    FloatArray,
    GradientEstimate,
    GradientMethod,
    SlidingWindow,
    Spectrum,
    detrend,
    dft,
    estimate_gradient_amplitude_phase,
    estimate_gradient_real_ratio,
)


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class ExtremumSeekingController:
    """Per-channel integral control on FFT gradient estimates.

    Gains are always positive; ``sense`` decides whether the update descends
    or ascends.  One call of :meth:`step` consumes the cost measured for the
    currently applied input and returns the input to apply next.

    Usage::

        ctrl = ExtremumSeekingController(dithers, n=128, u0=[0.2], gains=[1e-5])
        u = ctrl.applied
        for _ in range(steps):
            u = ctrl.step(plant.cost(u))
    """

    def __init__(
        self,
        dithers: DitherSet,
        n: int,
        u0: Sequence[float],
        gains: Sequence[float],
        sense: Sense | str = Sense.MINIMIZE,
        box: Sequence[tuple[float, float]] | None = None,
        method: GradientMethod | str = GradientMethod.AMPLITUDE_PHASE_SIGN,
    ) -> None:
        self.dithers = dithers
        m = len(dithers)
        self.n = int(n)
        if self.n < 2:
            raise ValueError("window length must be at least 2")
        self.nominal: FloatArray = np.array(u0, dtype=np.float64)
        self.gains: FloatArray = np.array(gains, dtype=np.float64)
        if self.nominal.shape != (m,) or self.gains.shape != (m,):
            raise ValueError(f"u0 and gains must each have {m} entries")
        if np.any(self.gains < 0):
            raise ValueError("gains must be non-negative; use sense='maximize' to ascend")
        self.sense = Sense(sense)
        self.method = GradientMethod(method)
        if box is not None:
            box_arr = np.array(box, dtype=np.float64)
            if box_arr.shape != (m, 2) or np.any(box_arr[:, 0] > box_arr[:, 1]):
                raise ValueError(f"box must be {m} (lo, hi) pairs with lo <= hi")
            self.box: FloatArray | None = box_arr
            self.nominal = self._clamp(self.nominal)
        else:
            self.box = None
        self.step_counter = 0
        self.cost_window = SlidingWindow(self.n)
        self.input_windows = [SlidingWindow(self.n) for _ in range(m)]
        self.last_cost_spectrum: Spectrum | None = None
        self.last_estimates: list[GradientEstimate] | None = None
        self.applied = self._applied_at(0)

    def _clamp(self, u: FloatArray) -> FloatArray:
        if self.box is None:
            return u
        return np.clip(u, self.box[:, 0], self.box[:, 1])

    def _applied_at(self, k: int) -> FloatArray:
        d = np.array([c.value(k) for c in self.dithers], dtype=np.float64)
        return self._clamp(self.nominal) + d

    @property
    def warmed_up(self) -> bool:
        return self.cost_window.is_full

    def step(self, cost_sample: float) -> FloatArray:
        """Record the cost of the applied input, update, return the next input."""
        cost_sample = float(cost_sample)
        if not math.isfinite(cost_sample):
            raise ValueError(f"non-finite cost sample {cost_sample!r} at step {self.step_counter}")
        self.cost_window.push(cost_sample)
        for w, x in zip(self.input_windows, self.applied):
            w.push(x)
        if self.cost_window.is_full:
            est = self.estimate_gradients()
            grad = np.array([e.value for e in est])
            direction = -1.0 if self.sense is Sense.MINIMIZE else 1.0
            self.nominal = self._clamp(self.nominal + direction * self.gains * grad)
        self.step_counter += 1
        self.applied = self._applied_at(self.step_counter)
        return self.applied

    def estimate_gradients(
        self, method: GradientMethod | str | None = None
    ) -> list[GradientEstimate]:
        """Gradient estimate per channel from the current (full) windows.

        The cost window is transformed once and shared by all channels.
        """
        method = self.method if method is None else GradientMethod(method)
        cost_spec = dft(detrend(self.cost_window))
        estimates = []
        for w, dither in zip(self.input_windows, self.dithers):
            input_spec = dft(detrend(w))
            if method is GradientMethod.AMPLITUDE_PHASE_SIGN:
                estimates.append(estimate_gradient_amplitude_phase(cost_spec, input_spec, dither))
            else:
                estimates.append(estimate_gradient_real_ratio(cost_spec, input_spec, dither))
        self.last_cost_spectrum = cost_spec
        self.last_estimates = estimates
        return estimates
