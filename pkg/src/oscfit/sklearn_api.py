"""Scikit-learn style front end: a fit/predict estimator and a smoothing transformer.

These wrap the functional modules so the algorithm composes with pipelines,
``clone``, ``get_params``/``set_params`` and the rest of the ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .estimate import PipelineConfig, run_pipeline
from .model import OscillatorParams, evaluate
from .smoothing import moving_average, moving_median, select_smoothing
from .synth import TimeSeries
from .validation import signal_1d, uniform_time_grid


class DampedOscillationEstimator(RegressorMixin, BaseEstimator):
    """Estimate ``[T, C, alpha, b, phi]`` of a damped sinusoid from noisy samples.

    The estimator treats the problem as a regression of displacement on
    time: ``fit(X, y)`` takes sample times (uniformly spaced) and
    displacements, ``predict(X)`` evaluates the fitted oscillation.

    Parameters
    ----------
    method : {"proposed", "traditional"}
        Which estimation route provides the fitted attributes.  "proposed"
        builds the parameters from crossing structure (period first) and is
        the more accurate route; "traditional" follows the classic
        damping-first sequence.
    kinds : tuple of {"mean", "median"}
        Smoothing filter kinds to consider.
    k_candidates : sequence of int, optional
        Window lengths to score; defaults to odd values capped by the
        period estimate.
    hysteresis : float
        Dead-band fraction for crossing detection.
    noise_band_sigmas : float
        Width of the adaptive dead band in residual-noise sigmas.

    Attributes
    ----------
    C_, b_, alpha_, phi_, T_, delta_t_ : float
        Fitted parameters (``b_``/``C_`` may be None if no envelope
        magnitudes were usable).
    params_ : OscillatorParams or None
        The full fitted parameter set when available.
    report_ : EstimationReport
        Full report of the selected method.
    result_ : PipelineResult
        Everything the pipeline produced (both methods, smoothing table,
        crossing set).

    Examples
    --------
    >>> import numpy as np
    >>> from oscfit import DampedOscillationEstimator
    >>> t = np.arange(0.0, 5.0, 0.005)
    >>> x = 2.0 * np.exp(-t) * np.sin(np.pi * t + np.pi / 4)
    >>> est = DampedOscillationEstimator().fit(t, x)
    >>> round(est.T_, 3)
    2.0
    """

    def __init__(
        self,
        method="proposed",
        kinds=("mean",),
        k_candidates=None,
        hysteresis=0.01,
        noise_band_sigmas=2.5,
    ):
        self.method = method
        self.kinds = kinds
        self.k_candidates = k_candidates
        self.hysteresis = hysteresis
        self.noise_band_sigmas = noise_band_sigmas

    def fit(self, X, y):
        if self.method not in ("proposed", "traditional"):
            raise ValueError(f"method must be 'proposed' or 'traditional', got {self.method!r}")
        t = signal_1d(X, "X")
        x = signal_1d(y, "y")
        if t.size != x.size:
            raise ValueError(f"X and y lengths differ: {t.size} != {x.size}")
        t0, dt = uniform_time_grid(t)
        series = TimeSeries(t0=t0, dt=dt, x=x)
        config = PipelineConfig(
            kinds=tuple(self.kinds),
            k_candidates=None if self.k_candidates is None else tuple(self.k_candidates),
            hysteresis=self.hysteresis,
            noise_band_sigmas=self.noise_band_sigmas,
        )
        result = run_pipeline(series, config)
        report = result.proposed if self.method == "proposed" else result.traditional
        if report is None:
            raise RuntimeError(f"traditional estimation failed: {result.traditional_error}")
        self.result_ = result
        self.report_ = report
        self.C_ = report.C_hat
        self.b_ = report.b_hat
        self.alpha_ = report.alpha_hat
        self.phi_ = report.phi_hat
        self.T_ = report.T_hat
        self.delta_t_ = report.dt_hat
        self.params_ = report.params_hat
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "report_")
        if self.params_ is None:
            raise RuntimeError("fit produced no full parameter set; cannot predict")
        return evaluate(self.params_, signal_1d(X, "X"))

    def oscillator(self) -> OscillatorParams:
        """The fitted parameter set (raises if the fit was partial)."""
        check_is_fitted(self, "report_")
        if self.params_ is None:
            raise RuntimeError("fit produced no full parameter set")
        return self.params_


class FirSmoother(TransformerMixin, BaseEstimator):
    """Causal moving-average or moving-median smoother for 1-D signals.

    With ``k=None`` the window is selected during ``fit`` by the RMS misfit
    rule; otherwise the given window is used as-is.  ``transform`` returns
    the filtered signal with the first ``k - 1`` values zeroed, matching the
    trailing-window convention.
    """

    def __init__(self, kind="mean", k=None, k_candidates=None):
        self.kind = kind
        self.k = k
        self.k_candidates = k_candidates

    def _series(self, X) -> TimeSeries:
        # the sample interval is irrelevant to the window arithmetic
        return TimeSeries(t0=0.0, dt=1.0, x=signal_1d(X, "X"))

    def fit(self, X, y=None):
        if self.kind not in ("mean", "median"):
            raise ValueError(f"kind must be 'mean' or 'median', got {self.kind!r}")
        if self.k is not None:
            self.k_ = int(self.k)
            self.choice_ = None
        else:
            self.choice_ = select_smoothing(
                self._series(X),
                kinds=(self.kind,),
                k_candidates=self.k_candidates,
            )
            self.k_ = self.choice_.k
        return self

    def transform(self, X):
        check_is_fitted(self, "k_")
        arr = np.asarray(X, dtype=float)
        series = self._series(X)
        apply = moving_average if self.kind == "mean" else moving_median
        out = apply(series, self.k_).x
        return out.reshape(arr.shape) if arr.ndim == 2 else out
