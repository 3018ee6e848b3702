"""oscfit: parameter estimation for noise-corrupted damped oscillations.

Estimates the parameter set [T, C, alpha, b, phi] of an underdamped
second-order oscillator from uniformly sampled, noisy displacement data.
"""

from .exceptions import (
    CsvParseError,
    InsufficientPointsError,
    NoCrossingsError,
    NoEnvelopePointsError,
    NonUniformSpacingError,
    OscillationError,
    PipelineError,
    TooShortError,
)
from .model import (
    AcfSpec,
    DECoefficients,
    OscillatorParams,
    acf,
    acf_normalized,
    antiderivative,
    envelope_tangent_time,
    evaluate,
    evaluate_derivatives,
    first_peak_time,
    integral_over_interval,
    normalize_phase,
    period,
    reconstruct_de,
    shift_factor,
    zero_cross_time,
)
from .synth import NoiseSpec, TimeSeries, add_gaussian_noise, generate_series
from .smoothing import (
    SmoothingChoice,
    default_k_candidates,
    moving_average,
    moving_median,
    rms_fit,
    select_smoothing,
)
from .extract import (
    CrossingSet,
    EnvelopePoint,
    find_zero_crossings,
    leading_tangent_point,
    locate_midpoints,
)
from .estimate import (
    AveragedParameters,
    EstimationReport,
    PipelineConfig,
    PipelineResult,
    average_parameters,
    estimate_amplitude_from_envelope,
    estimate_amplitude_single_point,
    estimate_damping_from_envelope,
    estimate_frequency_from_tangent,
    estimate_phase_from_initial_value,
    estimate_proposed,
    estimate_traditional,
    phase_from_crossing,
    relative_errors,
    run_pipeline,
    solve_structural_equations,
)
from .sklearn_api import DampedOscillationEstimator, FirSmoother

__version__ = "0.1.0"

__all__ = [
    "AcfSpec",
    "AveragedParameters",
    "CrossingSet",
    "CsvParseError",
    "DECoefficients",
    "DampedOscillationEstimator",
    "EnvelopePoint",
    "EstimationReport",
    "FirSmoother",
    "InsufficientPointsError",
    "NoCrossingsError",
    "NoEnvelopePointsError",
    "NoiseSpec",
    "NonUniformSpacingError",
    "OscillationError",
    "OscillatorParams",
    "PipelineConfig",
    "PipelineError",
    "PipelineResult",
    "SmoothingChoice",
    "TimeSeries",
    "TooShortError",
    "acf",
    "acf_normalized",
    "add_gaussian_noise",
    "antiderivative",
    "average_parameters",
    "default_k_candidates",
    "envelope_tangent_time",
    "estimate_amplitude_from_envelope",
    "estimate_amplitude_single_point",
    "estimate_damping_from_envelope",
    "estimate_frequency_from_tangent",
    "estimate_phase_from_initial_value",
    "estimate_proposed",
    "estimate_traditional",
    "evaluate",
    "evaluate_derivatives",
    "find_zero_crossings",
    "first_peak_time",
    "generate_series",
    "integral_over_interval",
    "leading_tangent_point",
    "locate_midpoints",
    "moving_average",
    "moving_median",
    "normalize_phase",
    "period",
    "phase_from_crossing",
    "reconstruct_de",
    "relative_errors",
    "rms_fit",
    "run_pipeline",
    "select_smoothing",
    "shift_factor",
    "solve_structural_equations",
    "zero_cross_time",
]
