"""Parameter estimation from characteristic time points.

Two routes are implemented:

* the traditional sequence: damping from an envelope log-ratio, amplitude
  from back-projected envelope reads, phase from the initial value, then
  frequency from an envelope intersection;
* the structural route (the more accurate one): period from crossing
  spacings, time delay from crossing positions, phase and frequency from
  those, and only then damping and amplitude from envelope tangencies,
  everything averaged across all available periods.

``run_pipeline`` chains smoothing selection, filtering, crossing extraction
and both estimators over a raw series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (
    InsufficientPointsError,
    NoCrossingsError,
    NoEnvelopePointsError,
    OscillationError,
    PipelineError,
)
from .extract import (
    CrossingSet,
    find_zero_crossings,
    leading_tangent_point,
    locate_midpoints,
    sample_at,
)
from .model import (
    TWO_PI,
    DECoefficients,
    OscillatorParams,
    normalize_phase,
    reconstruct_de,
)
from .smoothing import SmoothingChoice, apply_choice, select_smoothing
from .synth import TimeSeries


@dataclass(frozen=True)
class EstimationReport:
    """Estimates from one method, plus the reconstructed equation and errors.

    ``b_hat``/``C_hat`` (and with them ``params_hat``/``de_hat``) are None
    when no usable envelope magnitudes were available; period, frequency and
    phase are always present.
    """

    method: str
    T_hat: float
    dt_hat: float
    alpha_hat: float
    phi_hat: float
    b_hat: float | None = None
    C_hat: float | None = None
    params_hat: OscillatorParams | None = None
    de_hat: DECoefficients | None = None
    smoothing: SmoothingChoice | None = None
    point_count: int = 0
    flags: tuple[str, ...] = ()
    errors_vs_truth: dict[str, float] | None = None


@dataclass(frozen=True)
class AveragedParameters:
    """Multi-period averages of the parameter set."""

    period: float                 # mean of doubled crossing spacings
    delay: float                  # mean of (k*T/2 - t_k), reduced into [0, T)
    damping: float | None         # mean of half-period envelope log-ratios
    amplitude: float | None       # mean of back-projected envelope magnitudes
    crossing_count: int
    envelope_pair_count: int


@dataclass
class PipelineConfig:
    """Options for :func:`run_pipeline`."""

    kinds: tuple[str, ...] = ("mean",)
    k_candidates: tuple[int, ...] | None = None
    hysteresis: float = 0.01
    noise_band_sigmas: float = 2.5
    refine_crossings: bool = True


@dataclass
class PipelineResult:
    traditional: EstimationReport | None
    proposed: EstimationReport
    smoothing: SmoothingChoice
    filtered: TimeSeries
    crossings: CrossingSet
    traditional_error: str | None = None


def estimate_damping_from_envelope(e1: float, e2: float, t1: float, t2: float) -> float:
    """Damping coefficient from two envelope magnitudes: ``b = ln(e1/e2)/(t2 - t1)``."""
    if not (e1 > 0.0 and e2 > 0.0):
        raise ValueError(f"envelope magnitudes must be > 0, got {e1}, {e2}")
    if not t2 > t1:
        raise ValueError(f"need t2 > t1, got t1={t1}, t2={t2}")
    return math.log(e1 / e2) / (t2 - t1)


def estimate_amplitude_single_point(e1: float, t1: float, b: float) -> float:
    """Amplitude constant from one envelope magnitude: ``C = e1 * exp(b*t1)``."""
    if not e1 > 0.0:
        raise ValueError(f"envelope magnitude must be > 0, got {e1}")
    return e1 * math.exp(b * t1)


def estimate_amplitude_from_envelope(e1: float, e2: float, t1: float, t2: float, b: float) -> float:
    """Amplitude constant averaged over two envelope magnitudes.

    ``C = (e1*exp(b*t1) + e2*exp(b*t2)) / 2``; with exact inputs this is the
    algebraic inverse of the envelope.
    """
    if not (e1 > 0.0 and e2 > 0.0):
        raise ValueError(f"envelope magnitudes must be > 0, got {e1}, {e2}")
    if not t2 > t1:
        raise ValueError(f"need t2 > t1, got t1={t1}, t2={t2}")
    return 0.5 * (e1 * math.exp(b * t1) + e2 * math.exp(b * t2))


def estimate_phase_from_initial_value(x0: float, C: float) -> tuple[float, float]:
    """Phase from the displacement at t = 0, two equivalent forms.

    Returns ``(arctan form, arcsin form)``: ``arctan(x0/sqrt(C^2 - x0^2))``
    and ``arcsin(x0/C)``.  Both resolve only phases in ``[-pi/2, pi/2]``;
    signals whose initial velocity points the other way are indistinguishable
    from the initial value alone.
    """
    if not C > 0.0:
        raise ValueError(f"amplitude must be > 0, got {C}")
    if abs(x0) > C:
        raise ValueError(f"|x0| = {abs(x0)} exceeds the amplitude {C}")
    if abs(x0) == C:
        half = math.copysign(math.pi / 2.0, x0)
        return half, half
    return math.atan(x0 / math.sqrt(C * C - x0 * x0)), math.asin(x0 / C)


def estimate_frequency_from_tangent(t_tangent: float, phi: float, k: int = 1) -> float:
    """Frequency from an envelope tangency at ``t_tangent ~ t_{k*pi/2}`` (k odd).

    At a tangency the sine factor is +-1, so ``alpha = (k*pi/2 - phi)/t``.
    """
    if not t_tangent > 0.0:
        raise ValueError(f"tangent time must be > 0, got {t_tangent}")
    if k < 1 or k % 2 == 0:
        raise ValueError(f"tangent index k must be odd and >= 1, got {k}")
    return (k * (math.pi / 2.0) - phi) / t_tangent


@dataclass(frozen=True)
class StructuralSolution:
    period: float
    quarter: float
    first_tangent_time: float


def solve_structural_equations(cset: CrossingSet) -> StructuralSolution:
    """Period and quarter-period structure from the first two crossings.

    ``T = 2*(t2 - t1)`` for adjacent crossings (the doubled half-period), and
    back-substitution places the tangency preceding the first crossing at
    ``t1 - T/4``.
    """
    if len(cset) < 2:
        raise InsufficientPointsError("need at least 2 crossings")
    span = float(cset.times[1] - cset.times[0])
    halves = int(cset.indices[1] - cset.indices[0])
    period = 2.0 * span / halves
    return StructuralSolution(
        period=period,
        quarter=period / 4.0,
        first_tangent_time=float(cset.times[0]) - period / 4.0,
    )


def phase_from_crossing(
    k: int,
    t_k: float,
    T: float,
    dt_shift: float,
    t_prev: float | None = None,
) -> tuple[float, float]:
    """Phase from any single crossing, in radians and degrees.

    Without ``t_prev`` the second-crossing reference form
    ``(T - t_2)*(k*pi - 2*pi)/(t_k - t_2)`` is used (undefined for k = 2,
    where the denominator vanishes).  With ``t_prev``, the half-period form
    ``pi * dt_shift / (t_k - t_prev)`` applies for any k >= 1.
    """
    if k < 1:
        raise ValueError(f"crossing index k must be >= 1, got {k}")
    if t_prev is not None:
        denom = t_k - t_prev
        if denom == 0.0:
            raise ValueError("zero denominator: t_k equals t_prev")
        rad = math.pi * dt_shift / denom
    else:
        t_2 = T - dt_shift
        denom = t_k - t_2
        if denom == 0.0:
            raise ValueError("zero denominator: this form is undefined at k = 2")
        rad = dt_shift * (k * math.pi - TWO_PI) / denom
    return rad, math.degrees(rad)


def average_parameters(cset: CrossingSet) -> AveragedParameters:
    """Average the parameter set across all crossings and envelope pairs.

    * period: ``2/(K-1) * sum(t_k - t_{k-1})`` over consecutive crossings
      (gaps spanning more than one half period are normalized by their count);
    * delay: ``1/K * sum(k*T/2 - t_k)`` using the crossing counters, reduced
      into ``[0, T)``;
    * damping: mean of ``ln(e1/e2)/(t2 - t1)`` over consecutive tangency
      pairs (magnitudes are absolute values: peaks and valleys alternate);
    * amplitude: mean of the back-projected magnitudes over the same pairs,
      using the averaged damping.

    Damping and amplitude are None when fewer than two usable envelope
    magnitudes exist.
    """
    if len(cset) < 2:
        raise InsufficientPointsError("need at least 2 crossings to average")
    times = cset.times
    indices = cset.indices

    gaps = np.diff(times)
    halves = np.diff(indices)
    T_bar = 2.0 * float(np.sum(gaps)) / float(np.sum(halves))

    raw_delay = float(np.mean(indices * (T_bar / 2.0) - times))
    delay = raw_delay % T_bar
    if delay == T_bar:
        delay = 0.0

    points = cset.envelope_points()
    pair_values = []
    pairs = []
    for p1, p2 in zip(points[:-1], points[1:]):
        if p2.k - p1.k != 2:
            continue  # not consecutive tangencies
        if p1.magnitude is None or p2.magnitude is None:
            continue
        if p1.magnitude <= 0.0 or p2.magnitude <= 0.0:
            continue
        pair_values.append(math.log(p1.magnitude / p2.magnitude) / (p2.time - p1.time))
        pairs.append((p1, p2))

    if pairs:
        b_bar = float(np.mean(pair_values))
        acc = 0.0
        for p1, p2 in pairs:
            acc += p1.magnitude * math.exp(b_bar * p1.time)
            acc += p2.magnitude * math.exp(b_bar * p2.time)
        C_bar = acc / (2.0 * len(pairs))
    else:
        b_bar = None
        C_bar = None

    return AveragedParameters(
        period=T_bar,
        delay=delay,
        damping=b_bar,
        amplitude=C_bar,
        crossing_count=len(cset),
        envelope_pair_count=len(pairs),
    )


def _with_tangent_points(cset: CrossingSet, series: TimeSeries) -> CrossingSet:
    """Fill midpoints and the leading tangent point if the caller has not."""
    if not cset.midpoints:
        cset = locate_midpoints(cset, series)
    if cset.leading is None:
        lead = leading_tangent_point(cset, series, solve_structural_equations(cset).period)
        if lead.magnitude is not None:
            cset = cset.with_leading(lead)
    return cset


def estimate_proposed(
    cset: CrossingSet,
    series: TimeSeries,
    smoothing: SmoothingChoice | None = None,
) -> EstimationReport:
    """Structural estimate: period first, then delay, phase, frequency, damping, amplitude.

    Requires at least two crossings.  When fewer than two envelope
    magnitudes are available the damping and amplitude are reported absent
    (flag ``no-envelope-points``) while period, frequency and phase are
    still produced.
    """
    cset = _with_tangent_points(cset, series)
    avg = average_parameters(cset)

    T_hat = avg.period
    dt_hat = avg.delay
    phi_hat = 0.0 if dt_hat == 0.0 else normalize_phase(TWO_PI * dt_hat / T_hat)
    alpha_hat = TWO_PI / T_hat

    flags = []
    params_hat = None
    de_hat = None
    if avg.damping is not None and avg.amplitude is not None and avg.damping >= 0.0:
        params_hat = OscillatorParams(C=avg.amplitude, b=avg.damping, alpha=alpha_hat, phi=phi_hat)
        de_hat = reconstruct_de(params_hat)
    else:
        flags.append("no-envelope-points" if avg.damping is None else "negative-damping-estimate")

    return EstimationReport(
        method="proposed",
        T_hat=T_hat,
        dt_hat=dt_hat,
        alpha_hat=alpha_hat,
        phi_hat=phi_hat,
        b_hat=avg.damping,
        C_hat=avg.amplitude,
        params_hat=params_hat,
        de_hat=de_hat,
        smoothing=smoothing,
        point_count=avg.crossing_count,
        flags=tuple(flags),
    )


def estimate_traditional(
    cset: CrossingSet,
    series: TimeSeries,
    smoothing: SmoothingChoice | None = None,
) -> EstimationReport:
    """Traditional sequence: damping, amplitude, phase, frequency, in that order.

    Needs two envelope tangencies a full period apart.  The phase step needs
    the displacement at t = 0; when that sample is unavailable (zeroed
    filter prefix) it is back-extrapolated through the structural delay and
    the report is flagged ``x0-back-extrapolated``.
    """
    cset = _with_tangent_points(cset, series)
    points = cset.envelope_points()

    pair = None
    for i, p1 in enumerate(points):
        for p2 in points[i + 1 :]:
            if p2.k - p1.k == 4 and p1.magnitude and p2.magnitude:
                pair = (p1, p2)
                break
        if pair:
            break
    if pair is None:
        raise InsufficientPointsError(
            "need two envelope tangencies one full period apart"
        )
    p1, p2 = pair

    flags = []
    b_hat = estimate_damping_from_envelope(p1.magnitude, p2.magnitude, p1.time, p2.time)
    C_hat = estimate_amplitude_from_envelope(p1.magnitude, p2.magnitude, p1.time, p2.time, b_hat)

    x0 = sample_at(series, 0.0 + cset.delay_correction)
    if x0 is None:
        # t = 0 is covered by the filter prefix: recover x(0) = C sin(phi)
        # from the structural delay estimate instead
        avg = average_parameters(cset)
        phi_structural = normalize_phase(TWO_PI * avg.delay / avg.period)
        x0 = C_hat * math.sin(phi_structural)
        flags.append("x0-back-extrapolated")
    if abs(x0) > C_hat:
        x0 = math.copysign(C_hat, x0)
        flags.append("x0-clamped-to-amplitude")
    _, phi_hat = estimate_phase_from_initial_value(x0, C_hat)

    alpha_hat = estimate_frequency_from_tangent(p1.time, phi_hat, k=p1.k)
    if alpha_hat <= 0.0:
        raise InsufficientPointsError("frequency estimate is not positive")
    T_hat = TWO_PI / alpha_hat

    params_hat = None
    de_hat = None
    if b_hat >= 0.0:
        params_hat = OscillatorParams(C=C_hat, b=b_hat, alpha=alpha_hat, phi=phi_hat)
        de_hat = reconstruct_de(params_hat)
    else:
        flags.append("negative-damping-estimate")

    return EstimationReport(
        method="traditional",
        T_hat=T_hat,
        dt_hat=phi_hat / alpha_hat,
        alpha_hat=alpha_hat,
        phi_hat=phi_hat,
        b_hat=b_hat,
        C_hat=C_hat,
        params_hat=params_hat,
        de_hat=de_hat,
        smoothing=smoothing,
        point_count=len(points),
        flags=tuple(flags),
    )


def relative_errors(report: EstimationReport, truth: OscillatorParams) -> dict[str, float]:
    """Per-parameter relative errors ``|est - true| / |true|``.

    The phase error uses the wrapped angular difference, divided by pi
    instead of ``|phi_true|`` when the true phase is within 0.1 rad of zero
    (plain division would blow up).  A zero true damping likewise falls back
    to the absolute deviation.
    """
    errors = {}
    true_T = truth.period
    errors["T"] = abs(report.T_hat - true_T) / true_T
    errors["alpha"] = abs(report.alpha_hat - truth.alpha) / truth.alpha
    dphi = abs(normalize_phase(report.phi_hat - truth.phi))
    errors["phi"] = dphi / (math.pi if abs(truth.phi) < 0.1 else abs(truth.phi))
    if report.C_hat is not None:
        errors["C"] = abs(report.C_hat - truth.C) / truth.C
    if report.b_hat is not None:
        errors["b"] = abs(report.b_hat - truth.b) / (truth.b if truth.b > 0.0 else 1.0)
    return errors


def run_pipeline(
    series: TimeSeries,
    config: PipelineConfig | None = None,
    truth: OscillatorParams | None = None,
) -> PipelineResult:
    """Smoothing selection, filtering, extraction and both estimators, end to end.

    Stage failures raise :class:`PipelineError` with the failing stage name;
    a traditional-method failure alone is recorded in the result instead of
    raising, since the structural estimate may still be fine.
    """
    config = config or PipelineConfig()

    try:
        choice = select_smoothing(series, kinds=config.kinds, k_candidates=config.k_candidates)
        filtered = apply_choice(series, choice)
    except (ValueError, OscillationError) as exc:
        raise PipelineError("smoothing", str(exc)) from exc

    try:
        cset = find_zero_crossings(
            filtered,
            delay=choice.delay,
            hysteresis=config.hysteresis,
            noise_band=config.noise_band_sigmas * choice.residual_sigma,
            refine=config.refine_crossings,
        )
        cset = _with_tangent_points(cset, filtered)
    except NoCrossingsError as exc:
        raise PipelineError("extraction", str(exc)) from exc

    try:
        proposed = estimate_proposed(cset, filtered, smoothing=choice)
    except OscillationError as exc:
        raise PipelineError("estimation", str(exc)) from exc

    traditional = None
    traditional_error = None
    try:
        traditional = estimate_traditional(cset, filtered, smoothing=choice)
    except (OscillationError, ValueError) as exc:
        traditional_error = f"{type(exc).__name__}: {exc}"

    if truth is not None:
        proposed = replace(proposed, errors_vs_truth=relative_errors(proposed, truth))
        if traditional is not None:
            traditional = replace(traditional, errors_vs_truth=relative_errors(traditional, truth))

    return PipelineResult(
        traditional=traditional,
        proposed=proposed,
        smoothing=choice,
        filtered=filtered,
        crossings=cset,
        traditional_error=traditional_error,
    )
