"""Multivariable extremum seeking control with FFT gradient estimation."""

__version__ = "0.1.0"

from .controller import ExtremumSeekingController, Sense
from .design import (
    DesignReport,
    DitherSet,
    MapBounds,
    Violation,
    ViolationKind,
    check_resolution,
    design_report,
    error_bound,
    gain_interval,
    mean_value_error_bound,
    validate_dithers,
    window_length,
)
from .sim import NoiseSpec, Scenario, Trace, gaussian_noise, run, spectrogram
from .spectral import (
    DitherSpec,
    GradientEstimate,
    GradientMethod,
    SlidingWindow,
    Spectrum,
    detrend,
    dft,
    estimate_gradient_amplitude_phase,
    estimate_gradient_real_ratio,
    phase_at,
    single_sided_amplitude,
)

__all__ = [
    "__version__",
    "DesignReport",
    "DitherSet",
    "DitherSpec",
    "ExtremumSeekingController",
    "GradientEstimate",
    "GradientMethod",
    "MapBounds",
    "NoiseSpec",
    "Scenario",
    "Sense",
    "SlidingWindow",
    "Spectrum",
    "Trace",
    "Violation",
    "ViolationKind",
    "check_resolution",
    "design_report",
    "detrend",
    "dft",
    "error_bound",
    "estimate_gradient_amplitude_phase",
    "estimate_gradient_real_ratio",
    "gain_interval",
    "gaussian_noise",
    "mean_value_error_bound",
    "phase_at",
    "run",
    "single_sided_amplitude",
    "spectrogram",
    "validate_dithers",
    "window_length",
]
