"""Windowed spectral analysis and FFT-based gradient estimation.

Everything here works on rectangular windows of ``N`` samples indexed
``k = 0..N-1``.  Frequencies are exact rationals in cycles per sample, so a
dither at ``f`` lands on bin ``f * N`` whenever that product is an integer.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

#: Relative factor of the near-stationary amplitude floor, see :func:`amplitude_floor`.
AMPLITUDE_FLOOR_FACTOR = 1e-12


class InsufficientSamplesError(ValueError):
    """Raised when a window is used before it holds ``N`` samples."""


class OffBinFrequencyError(ValueError):
    """Raised when ``f * N`` is not an integer for the requested frequency."""


class PhaseUndefinedError(ArithmeticError):
    """The component at the requested bin is too small to carry a phase."""


class DegenerateInputPhaseError(ZeroDivisionError):
    """Re(U(w)) vanished, so the real-part ratio cannot be formed."""


def as_fraction(value: Fraction | str | int | float) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Strings such as ``"17/128"`` are parsed exactly.  Floats are converted
    through their shortest decimal representation, so ``0.125`` becomes
    ``1/8`` rather than a binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a frequency")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class DitherSpec:
    """A sinusoidal perturbation ``amplitude * sin(2 pi f k + phase)``."""

    amplitude: float
    frequency: Fraction
    phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequency", as_fraction(self.frequency))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "phase", float(self.phase))
        if not self.amplitude > 0:
            raise ValueError(f"dither amplitude must be positive, got {self.amplitude}")
        if not 0 < self.frequency < Fraction(1, 2):
            raise ValueError(
                f"dither frequency must lie strictly between 0 and 1/2, got {self.frequency}"
            )

    @property
    def omega(self) -> float:
        """Angular frequency in radians per sample."""
        return 2.0 * math.pi * float(self.frequency)

    def value(self, k: int) -> float:
        """Dither value at global sample index ``k``.

        The argument is reduced modulo one period in exact integer arithmetic,
        so the signal stays periodic to the last bit for arbitrarily large ``k``.
        """
        p, q = self.frequency.numerator, self.frequency.denominator
        return self.amplitude * math.sin(2.0 * math.pi * ((p * k) % q) / q + self.phase)


class SlidingWindow:
    """Fixed-capacity buffer of the most recent samples, oldest first."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("window capacity must be a positive integer")
        self.capacity = int(capacity)
        self._buf: deque[float] = deque(maxlen=self.capacity)

    def push(self, sample: float) -> None:
        self._buf.append(float(sample))

    def extend(self, samples: Iterable[float]) -> None:
        for s in samples:
            self.push(s)

    @property
    def fill_count(self) -> int:
        return len(self._buf)

    @property
    def is_full(self) -> bool:
        return len(self._buf) == self.capacity

    @property
    def data(self) -> FloatArray:
        return np.fromiter(self._buf, dtype=np.float64, count=len(self._buf))

    def __len__(self) -> int:
        return len(self._buf)

    def __repr__(self) -> str:
        return f"SlidingWindow(capacity={self.capacity}, fill_count={self.fill_count})"


@dataclass(frozen=True)
class Spectrum:
    """Complex DFT bins of one window plus the derived one-sided views."""

    n_points: int
    bins: ComplexArray = field(repr=False)

    @property
    def amplitude_single_sided(self) -> FloatArray:
        """Physical oscillation amplitude at bins ``0..N//2``.

        Interior bins are scaled by ``2/N``; DC and (for even ``N``) Nyquist
        by ``1/N``, so a unit sinusoid on an interior bin reads 1.
        """
        n = self.n_points
        amp = np.abs(self.bins[: n // 2 + 1]) * (2.0 / n)
        amp[0] *= 0.5
        if n % 2 == 0:
            amp[-1] *= 0.5
        return amp

    @property
    def phase(self) -> FloatArray:
        """Bin phases in ``(-pi, pi]`` over bins ``0..N//2``."""
        return _principal(np.angle(self.bins[: self.n_points // 2 + 1]))

    @property
    def bin_frequencies(self) -> FloatArray:
        """Frequencies of the one-sided bins in cycles per sample."""
        return np.arange(self.n_points // 2 + 1) / self.n_points

    @cached_property
    def rms(self) -> float:
        """RMS of the transformed samples, recovered through Parseval."""
        return math.sqrt(float(np.sum(np.abs(self.bins) ** 2)) / self.n_points**2)

    def bin_index(self, f: Fraction | str | float) -> int:
        """Index of the bin holding frequency ``f``; refuses off-bin requests."""
        return _bin_index(as_fraction(f), self.n_points)


@lru_cache(maxsize=4096)
def _bin_index(f: Fraction, n: int) -> int:
    if not 0 < f < Fraction(1, 2):
        raise ValueError(f"frequency must lie strictly between 0 and 1/2, got {f}")
    m = f * n
    if m.denominator != 1:
        raise OffBinFrequencyError(
            f"frequency {f} is not on an {n}-point DFT bin "
            f"(f*N = {m}); choose N as a multiple of {f.denominator}"
        )
    return int(m)


def _principal(angle: FloatArray) -> FloatArray:
    # np.angle returns [-pi, pi]; fold -pi onto +pi.
    return np.where(angle <= -math.pi, angle + 2.0 * math.pi, angle)


def _phase(z: complex) -> float:
    a = cmath.phase(z)
    return math.pi if a == -math.pi else a


def wrap_phase(angle: float) -> float:
    """Wrap an angle into ``(-pi, pi]``."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def detrend(window: SlidingWindow | Sequence[float] | FloatArray) -> FloatArray:
    """Remove the window mean.

    Accepts a :class:`SlidingWindow` (which must be full) or a plain
    sequence of samples.
    """
    if isinstance(window, SlidingWindow):
        if not window.is_full:
            raise InsufficientSamplesError(
                f"insufficient samples: window holds {window.fill_count} of {window.capacity}"
            )
        x = window.data
    else:
        x = np.asarray(window, dtype=np.float64)
    return x - x.mean()


def dft(samples: Sequence[float] | FloatArray) -> Spectrum:
    """N-point DFT ``X(l) = sum_k x(k) exp(-2j pi l k / N)`` for any ``N >= 2``."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"DFT needs a 1-D signal of length >= 2, got shape {x.shape}")
    return Spectrum(n_points=x.size, bins=np.fft.fft(x))


def amplitude_floor(spectrum: Spectrum) -> float:
    """Amplitude below which a bin is treated as carrying no phase."""
    return AMPLITUDE_FLOOR_FACTOR * (spectrum.rms + 1.0)


def single_sided_amplitude(spectrum: Spectrum, f: Fraction | str | float) -> float:
    """Oscillation amplitude ``(2/N)|X(fN)|`` of the component at ``f``."""
    m = spectrum.bin_index(f)
    return 2.0 * abs(spectrum.bins[m]) / spectrum.n_points


def phase_at(
    spectrum: Spectrum, f: Fraction | str | float, floor: float | None = None
) -> float:
    """Phase of bin ``fN`` in ``(-pi, pi]``.

    Raises :class:`PhaseUndefinedError` if the amplitude there does not
    exceed ``floor`` (default :func:`amplitude_floor`).
    """
    m = spectrum.bin_index(f)
    if floor is None:
        floor = amplitude_floor(spectrum)
    amp = 2.0 * abs(spectrum.bins[m]) / spectrum.n_points
    if amp <= floor:
        raise PhaseUndefinedError(f"amplitude {amp:.3e} at f={f} is below floor {floor:.3e}")
    return _phase(complex(spectrum.bins[m]))


class GradientMethod(str, Enum):
    AMPLITUDE_PHASE_SIGN = "amplitude_phase_sign"
    REAL_PART_RATIO = "real_part_ratio"


@dataclass(frozen=True)
class GradientEstimate:
    """Estimated steady-state gradient for one input channel."""

    value: float
    amplitude_at_dither: float
    phase_cost: float
    phase_input: float
    method: GradientMethod
    near_stationary: bool = False


def estimate_gradient_amplitude_phase(
    cost_spectrum: Spectrum,
    input_spectrum: Spectrum,
    dither: DitherSpec,
    amp_floor: float | None = None,
) -> GradientEstimate:
    """Gradient magnitude from the cost amplitude, sign from the phase lag.

    The magnitude is ``(2/N)|J(w)| / a``.  The sign is ``+1`` when the cost
    component at the dither bin is within ``pi/2`` of the input component,
    evaluated as ``sign(cos(phi_J - phi_u))``.  A cost amplitude at or below
    the floor yields a zero estimate flagged ``near_stationary``.
    """
    _check_same_length(cost_spectrum, input_spectrum)
    f = dither.frequency
    amp = single_sided_amplitude(cost_spectrum, f)
    try:
        phi_j = phase_at(cost_spectrum, f, amp_floor)
        phi_u = phase_at(input_spectrum, f)
    except PhaseUndefinedError:
        return GradientEstimate(
            value=0.0,
            amplitude_at_dither=amp,
            phase_cost=float("nan"),
            phase_input=float("nan"),
            method=GradientMethod.AMPLITUDE_PHASE_SIGN,
            near_stationary=True,
        )
    sign = 1.0 if math.cos(wrap_phase(phi_j - phi_u)) >= 0.0 else -1.0
    return GradientEstimate(
        value=sign * amp / dither.amplitude,
        amplitude_at_dither=amp,
        phase_cost=phi_j,
        phase_input=phi_u,
        method=GradientMethod.AMPLITUDE_PHASE_SIGN,
    )


def estimate_gradient_real_ratio(
    cost_spectrum: Spectrum,
    input_spectrum: Spectrum,
    dither: DitherSpec,
    den_floor: float = 1e-6,
) -> GradientEstimate:
    """Gradient as ``Re J(w) / Re U(w)``.

    ``den_floor`` is relative: the ratio is refused when
    ``|Re U(w)| <= den_floor * |U(w)|``, which happens whenever the window
    starts near a zero crossing of the dither.
    """
    _check_same_length(cost_spectrum, input_spectrum)
    m = cost_spectrum.bin_index(dither.frequency)
    jc = cost_spectrum.bins[m]
    uc = input_spectrum.bins[m]
    if abs(uc.real) <= den_floor * abs(uc) or uc == 0:
        raise DegenerateInputPhaseError(
            f"degenerate input phase at f={dither.frequency}: Re U = {uc.real:.3e}; "
            "give the dither a nonzero phase offset (e.g. a quarter bin) or use "
            "the amplitude/phase method"
        )
    n = cost_spectrum.n_points
    return GradientEstimate(
        value=float(jc.real / uc.real),
        amplitude_at_dither=2.0 * abs(jc) / n,
        phase_cost=_phase(complex(jc)),
        phase_input=_phase(complex(uc)),
        method=GradientMethod.REAL_PART_RATIO,
    )


def _check_same_length(a: Spectrum, b: Spectrum) -> None:
    if a.n_points != b.n_points:
        raise ValueError(f"spectra differ in length: {a.n_points} vs {b.n_points}")
