"""Design rules for the dither set, window length and integral gains."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from .spectral import DitherSpec

#: Slack factor d > 1 in the gain bound; near 1 is least conservative.
DEFAULT_D = 1.01

_INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class DitherSet:
    """One dither per input channel, in channel order."""

    channels: tuple[DitherSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.channels:
            raise ValueError("a dither set needs at least one channel")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, Fraction | str]]) -> "DitherSet":
        """Build from ``(amplitude, frequency)`` pairs."""
        return cls(tuple(DitherSpec(a, f) for a, f in pairs))

    @property
    def frequencies(self) -> tuple[Fraction, ...]:
        return tuple(c.frequency for c in self.channels)

    @property
    def amplitudes(self) -> tuple[float, ...]:
        return tuple(c.amplitude for c in self.channels)

    def __len__(self) -> int:
        return len(self.channels)

    def __iter__(self) -> Iterator[DitherSpec]:
        return iter(self.channels)

    def __getitem__(self, i: int) -> DitherSpec:
        return self.channels[i]


class ViolationKind(str, Enum):
    DUPLICATE = "duplicate"
    SECOND_HARMONIC = "second_harmonic"
    SUM_COLLISION = "sum_collision"
    RESOLUTION = "resolution"


@dataclass(frozen=True)
class Violation:
    """A dither-independence problem.  ``channels`` are 0-based indices.

    For ``second_harmonic`` the order is ``(i, j)`` with ``2 f_i = f_j``; for
    ``sum_collision`` it is ``(i, j, k)`` with ``f_i + f_j = f_k``.
    """

    kind: ViolationKind
    channels: tuple[int, ...]

    def describe(self, freqs: Sequence[Fraction]) -> str:
        ch = [c + 1 for c in self.channels]
        f = [freqs[c] for c in self.channels]
        if self.kind is ViolationKind.DUPLICATE:
            return f"duplicate: channels {ch[0]} and {ch[1]} share f = {f[0]}"
        if self.kind is ViolationKind.SECOND_HARMONIC:
            return f"second_harmonic: 2 x {f[0]} (ch {ch[0]}) = {f[1]} (ch {ch[1]})"
        if self.kind is ViolationKind.SUM_COLLISION:
            return (
                f"sum_collision: {f[0]} (ch {ch[0]}) + {f[1]} (ch {ch[1]}) "
                f"= {f[2]} (ch {ch[2]})"
            )
        return (
            f"resolution: channels {ch[0]} and {ch[1]} ({f[0]}, {f[1]}) "
            "are not separable at this window length"
        )


def validate_dithers(dithers: DitherSet) -> list[Violation]:
    """All pairwise/triple frequency collisions, using exact arithmetic.

    The checks are ``f_i != f_j``, ``2 f_i != f_j`` and ``f_i + f_j != f_k``
    over distinct channels.  Violations are reported, never raised.
    """
    f = dithers.frequencies
    n = len(f)
    out: list[Violation] = []
    for i, j in itertools.combinations(range(n), 2):
        if f[i] == f[j]:
            out.append(Violation(ViolationKind.DUPLICATE, (i, j)))
    for i, j in itertools.permutations(range(n), 2):
        if 2 * f[i] == f[j]:
            out.append(Violation(ViolationKind.SECOND_HARMONIC, (i, j)))
    for i, j in itertools.combinations(range(n), 2):
        s = f[i] + f[j]
        for k in range(n):
            if k != i and k != j and f[k] == s:
                out.append(Violation(ViolationKind.SUM_COLLISION, (i, j, k)))
    return out


def window_length(dithers: DitherSet, gamma: int = 1) -> int:
    """Smallest window holding whole periods of every dither, times ``gamma``."""
    if gamma < 1 or int(gamma) != gamma:
        raise ValueError(f"gamma must be a positive integer, got {gamma}")
    n = math.lcm(*(f.denominator for f in dithers.frequencies)) * int(gamma)
    if n > _INT_MAX:
        raise OverflowError(f"window length {n} exceeds the 64-bit integer range")
    return n


def check_resolution(dithers: DitherSet, n: int) -> list[tuple[int, int]]:
    """Channel pairs closer than the main-lobe width ``1/(N-1)``."""
    if n < 2:
        raise ValueError("window length must be at least 2")
    f = dithers.frequencies
    limit = Fraction(1, n - 1)
    return [
        (i, j)
        for i, j in itertools.combinations(range(len(f)), 2)
        if abs(f[i] - f[j]) <= limit
    ]


@dataclass(frozen=True)
class MapBounds:
    """Curvature bounds of the cost map around its optimum.

    ``alpha1 * e**2 <= dJ/du_i * e <= alpha2 * e**2`` with ``e = u_i - u_i*``, and
    ``hessian_bound[i]`` bounds ``|d2J/du_i2|`` over the operating box.
    """

    alpha1: float
    alpha2: float
    hessian_bound: tuple[float, ...]
    d: float = DEFAULT_D

    def __post_init__(self) -> None:
        hb = self.hessian_bound
        if isinstance(hb, (int, float)):
            hb = (hb,)
        object.__setattr__(self, "hessian_bound", tuple(float(h) for h in hb))
        if not 0 < self.alpha1 <= self.alpha2:
            raise ValueError(f"need 0 < alpha1 <= alpha2, got {self.alpha1}, {self.alpha2}")
        if not self.d > 1:
            raise ValueError(f"d must exceed 1, got {self.d}")
        if not self.hessian_bound or any(not h > 0 for h in self.hessian_bound):
            raise ValueError("every Hessian bound must be positive")

    def for_channels(self, n: int) -> tuple[float, ...]:
        """Hessian bounds broadcast to ``n`` channels."""
        if len(self.hessian_bound) == 1:
            return self.hessian_bound * n
        if len(self.hessian_bound) != n:
            raise ValueError(f"{len(self.hessian_bound)} Hessian bounds for {n} channels")
        return self.hessian_bound


def gain_interval(bounds: MapBounds, n: int, channels: int | None = None) -> list[float]:
    """Upper ends ``K_max,i`` of the stabilising gain intervals ``(0, K_max,i)``.

    ``K_max,i = alpha1 / (alpha2 * N * H_i * d)``.
    """
    if n < 1:
        raise ValueError("window length must be positive")
    hb = bounds.for_channels(channels) if channels is not None else bounds.hessian_bound
    return [bounds.alpha1 / (bounds.alpha2 * n * h * bounds.d) for h in hb]


def error_bound(gain: float, n: int, hessian_bound: float, max_recent_gradient: float) -> float:
    """Worst-case sliding-window gradient error ``K N |H| max|dJ/du|``."""
    return gain * n * hessian_bound * max_recent_gradient


def mean_value_error_bound(hessian_bound: float, input_span: float) -> float:
    """Error bound ``|H| * du`` for an input that spanned ``du`` over the window."""
    return hessian_bound * input_span


@dataclass
class DesignReport:
    n_min: int
    n_used: int
    violations: list[Violation] = field(default_factory=list)
    gain_bounds: list[float] | None = None

    @property
    def has_warnings(self) -> bool:
        return bool(self.violations)


def design_report(
    dithers: DitherSet,
    bounds: MapBounds | None = None,
    n: int | None = None,
) -> DesignReport:
    """Collect every design check for ``dithers`` at window length ``n``.

    ``n`` defaults to the minimum leakage-free length.
    """
    n_min = window_length(dithers, 1)
    n_used = n_min if n is None else int(n)
    violations = validate_dithers(dithers)
    violations += [
        Violation(ViolationKind.RESOLUTION, pair) for pair in check_resolution(dithers, n_used)
    ]
    gains = gain_interval(bounds, n_used, len(dithers)) if bounds is not None else None
    return DesignReport(n_min=n_min, n_used=n_used, violations=violations, gain_bounds=gains)
