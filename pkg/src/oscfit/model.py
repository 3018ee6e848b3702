"""Closed-form model of the underdamped oscillator.

The displacement is ``x(t) = C * exp(-b*t) * sin(alpha*t + phi)`` with
amplitude constant ``C > 0``, damping coefficient ``b >= 0``, damped angular
frequency ``alpha > 0`` and initial phase ``phi`` in ``[-pi, pi)``.  This is
the oscillatory solution of ``x'' + 2*b*x' + (b^2 + alpha^2)*x = 0``.

Everything in this module is an exact consequence of that form: calculus,
characteristic time points (zero crossings, envelope tangencies, the first
peak), the reconstructed differential equation and the windowed
autocorrelation function.  All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

TWO_PI = 2.0 * math.pi


def normalize_phase(angle: float) -> float:
    """Wrap an angle into ``[-pi, pi)``.

    Angles already in range are returned unchanged (bit-for-bit), so exact
    values like ``pi/4`` survive normalization.
    """
    a = float(angle)
    if -math.pi <= a < math.pi:
        return a
    a = math.fmod(a + math.pi, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return a - math.pi


@dataclass(frozen=True)
class OscillatorParams:
    """Parameter set of a damped sinusoid ``C * exp(-b*t) * sin(alpha*t + phi)``.

    Parameters
    ----------
    C : float
        Amplitude constant, signal units, strictly positive.
    b : float
        Damping coefficient, 1/s, non-negative (``b = 0`` is simple harmonic
        motion).
    alpha : float
        Damped angular frequency, rad/s, strictly positive.
    phi : float
        Initial phase, radians; normalized into ``[-pi, pi)`` on construction.

    The underdamped condition ``b < omega`` with ``omega = sqrt(alpha^2 + b^2)``
    holds by construction for every valid instance.
    """

    C: float
    b: float
    alpha: float
    phi: float

    def __post_init__(self):
        for name in ("C", "b", "alpha", "phi"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.C) and self.C > 0.0):
            raise ValueError(f"amplitude C must be finite and > 0, got {self.C}")
        if not (math.isfinite(self.b) and self.b >= 0.0):
            raise ValueError(f"damping b must be finite and >= 0, got {self.b}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"frequency alpha must be finite and > 0, got {self.alpha}")
        if not math.isfinite(self.phi):
            raise ValueError("phase phi must be finite")
        object.__setattr__(self, "phi", normalize_phase(self.phi))

    @property
    def period(self) -> float:
        """Pseudo period ``T = 2*pi/alpha``."""
        return TWO_PI / self.alpha

    @property
    def omega(self) -> float:
        """Undamped natural frequency ``sqrt(alpha^2 + b^2)``."""
        return math.hypot(self.alpha, self.b)

    @property
    def delta_t(self) -> float:
        """Shift factor (time delay) ``phi/alpha``."""
        return self.phi / self.alpha


@dataclass(frozen=True)
class DECoefficients:
    """Coefficients of the reconstructed equation ``x'' + damping_term*x' + stiffness_term*x = 0``."""

    damping_term: float        # 2*b
    stiffness_term: float      # omega^2 = b^2 + alpha^2
    roots: tuple[complex, complex]

    def __post_init__(self):
        # undercritical damping: the discriminant (b^2 - omega^2) is negative
        if self.stiffness_term <= (self.damping_term / 2.0) ** 2:
            raise ValueError("coefficients are not in the underdamped regime")

    @property
    def discriminant(self) -> float:
        return (self.damping_term / 2.0) ** 2 - self.stiffness_term

    def equation(self) -> str:
        """Human-readable form ``x'' + {2b}x' + {omega^2}x = 0``."""
        return f"x'' + {self.damping_term:g}x' + {self.stiffness_term:g}x = 0"


@dataclass(frozen=True)
class AcfSpec:
    """Integration window and lag of the windowed autocorrelation."""

    window: float   # seconds, > 0
    lag: float      # seconds, >= 0

    def __post_init__(self):
        if not (math.isfinite(self.window) and self.window > 0.0):
            raise ValueError(f"window must be finite and > 0, got {self.window}")
        if not (math.isfinite(self.lag) and self.lag >= 0.0):
            raise ValueError(f"lag must be finite and >= 0, got {self.lag}")


def _maybe_scalar(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


def evaluate(params: OscillatorParams, t):
    """Displacement ``C * exp(-b*t) * sin(alpha*t + phi)``.

    Accepts a scalar time or an array of times; returns a float or an array
    of matching shape.
    """
    tt = np.asarray(t, dtype=float)
    out = params.C * np.exp(-params.b * tt) * np.sin(params.alpha * tt + params.phi)
    return _maybe_scalar(out)


def evaluate_derivatives(params: OscillatorParams, t):
    """Velocity and acceleration of the displacement at time ``t``.

    ``x'(t) = C e^{-bt} [alpha cos(theta) - b sin(theta)]`` and
    ``x''(t) = C e^{-bt} [(b^2 - alpha^2) sin(theta) - 2 alpha b cos(theta)]``
    with ``theta = alpha*t + phi``.
    """
    tt = np.asarray(t, dtype=float)
    C, b, a = params.C, params.b, params.alpha
    theta = a * tt + params.phi
    env = C * np.exp(-b * tt)
    vel = env * (a * np.cos(theta) - b * np.sin(theta))
    acc = env * ((b * b - a * a) * np.sin(theta) - 2.0 * a * b * np.cos(theta))
    return _maybe_scalar(vel), _maybe_scalar(acc)


def antiderivative(params: OscillatorParams, t):
    """Antiderivative ``F`` of the displacement with ``F'(t) = evaluate(params, t)``.

    ``F(t) = -C e^{-bt} [b sin(theta) + alpha cos(theta)] / (alpha^2 + b^2)``.
    The overall sign is fixed by the derivative identity, which is verified
    against finite differences and quadrature in the test suite.
    """
    tt = np.asarray(t, dtype=float)
    C, b, a = params.C, params.b, params.alpha
    theta = a * tt + params.phi
    out = -C * np.exp(-b * tt) * (b * np.sin(theta) + a * np.cos(theta)) / (a * a + b * b)
    return _maybe_scalar(out)


def integral_over_interval(params: OscillatorParams, t1: float, t2: float) -> float:
    """Definite integral of the displacement over ``[t1, t2]``.

    Unlike simple harmonic motion, the integral over one pseudo period is
    not zero when ``b > 0``.
    """
    if not t1 <= t2:
        raise ValueError(f"need t1 <= t2, got [{t1}, {t2}]")
    return antiderivative(params, t2) - antiderivative(params, t1)


def period(params: OscillatorParams) -> float:
    """Pseudo period ``T = 2*pi/alpha = 2*pi/sqrt(omega^2 - b^2)``."""
    return TWO_PI / params.alpha


def zero_cross_time(params: OscillatorParams, k: int) -> float:
    """Time of the k-th zero crossing, ``t = (k*pi - phi)/alpha`` for ``k >= 1``.

    Consecutive crossings are spaced half a period apart; odd ``k`` are
    falling crossings and even ``k`` rising ones.
    """
    if k < 1:
        raise ValueError(f"crossing index k must be >= 1, got {k}")
    return (k * math.pi - params.phi) / params.alpha


def envelope_tangent_time(params: OscillatorParams, k: int) -> float:
    """Time where the signal touches the envelope, ``t = ((2k+1)*pi/2 - phi)/alpha``.

    These are the midpoints of consecutive zero crossings; the sine factor is
    exactly +-1 there, so ``|x(t)| = C e^{-bt}``.
    """
    if k < 0:
        raise ValueError(f"tangent index k must be >= 0, got {k}")
    return ((2 * k + 1) * (math.pi / 2.0) - params.phi) / params.alpha


def shift_factor(params: OscillatorParams) -> float:
    """Shift factor (time delay) of the sine wave, ``delta_t = phi/alpha``."""
    return params.phi / params.alpha


def first_peak_time(params: OscillatorParams) -> float:
    """Stationary point of the first loop, ``t = (arctan(alpha/b) - phi)/alpha``.

    This is where ``x'(t) = 0``, which for ``b > 0`` is strictly earlier than
    the first envelope tangency: the curve peaks before it touches the
    envelope.  In the limit ``b -> 0`` (handled here via atan2) both coincide
    at ``(pi/2 - phi)/alpha``.
    """
    return (math.atan2(params.alpha, params.b) - params.phi) / params.alpha


def reconstruct_de(params: OscillatorParams) -> DECoefficients:
    """Coefficients and roots of the generating equation ``x'' + 2b x' + omega^2 x = 0``.

    The characteristic roots are the complex conjugate pair ``-b +- alpha*i``.
    """
    b, a = params.b, params.alpha
    return DECoefficients(
        damping_term=2.0 * b,
        stiffness_term=b * b + a * a,
        roots=(complex(-b, a), complex(-b, -a)),
    )


def _acf_closed_form(params: OscillatorParams, window: float, lag: float) -> float:
    C, b, a = params.C, params.b, params.alpha
    theta0 = a * lag + 2.0 * params.phi
    theta1 = 2.0 * a * window + a * lag + 2.0 * params.phi
    if b > 0.0:
        decay = math.exp(-2.0 * b * window)
        base = (1.0 - decay) / (2.0 * b)
        osc = (
            decay * (2.0 * a * math.sin(theta1) - 2.0 * b * math.cos(theta1))
            + 2.0 * b * math.cos(theta0)
            - 2.0 * a * math.sin(theta0)
        ) / (4.0 * (a * a + b * b))
    else:
        base = window
        osc = (math.sin(theta1) - math.sin(theta0)) / (2.0 * a)
    return (C * C / (2.0 * window)) * math.exp(-b * lag) * (math.cos(a * lag) * base - osc)


def acf(params: OscillatorParams, spec: AcfSpec, mode: str = "closed_form") -> float:
    """Windowed autocorrelation ``R(tau) = (1/T_w) * integral_0^{T_w} x(t) x(t+tau) dt``.

    ``mode="numeric"`` evaluates the integral by adaptive quadrature;
    ``mode="closed_form"`` evaluates the analytic antiderivative of the
    product.  The two agree to quadrature accuracy for any valid inputs.
    """
    if mode == "numeric":
        value, _ = quad(
            lambda u: evaluate(params, u) * evaluate(params, u + spec.lag),
            0.0,
            spec.window,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=400,
        )
        return value / spec.window
    if mode == "closed_form":
        return _acf_closed_form(params, spec.window, spec.lag)
    raise ValueError(f"mode must be 'closed_form' or 'numeric', got {mode!r}")


def acf_normalized(params: OscillatorParams, spec: AcfSpec, mode: str = "closed_form") -> float:
    """Autocorrelation scaled by ``1/R(0)`` so the zero-lag value is exactly 1."""
    zero_lag = acf(params, AcfSpec(window=spec.window, lag=0.0), mode=mode)
    return acf(params, spec, mode=mode) / zero_lag
