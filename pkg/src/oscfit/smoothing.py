"""Causal FIR smoothing (moving average / moving median) and RMS window selection.

The filters use a trailing window of ``k`` samples, so the first ``k - 1``
outputs are zeroed and flagged via ``TimeSeries.prefix``.  The trailing
window introduces a group delay of ``(k - 1)/2 * dt`` which is recorded in
``SmoothingChoice.delay`` and compensated during crossing extraction.

Window selection follows the misfit rule: for each candidate ``(kind, k)``
compute ``RMS(k) = sqrt(sum_{j=k}^{N} (filtered_j - raw_j)^2 / (N - k))``
(1-based ``j``, zeroed prefix excluded) and keep the argmin.  Ties prefer
the smaller ``k``, and mean before median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .synth import TimeSeries

KINDS = ("mean", "median")
_KIND_RANK = {kind: i for i, kind in enumerate(KINDS)}


@dataclass(frozen=True)
class SmoothingCandidate:
    kind: str
    k: int
    rms: float            # NaN when the candidate could not be evaluated
    error: str | None = None


@dataclass(frozen=True)
class SmoothingChoice:
    """Winning filter plus the full candidate table that produced it."""

    kind: str
    k: int
    rms: float
    delay: float          # trailing-window group delay (k-1)/2 * dt
    candidates: tuple[SmoothingCandidate, ...]

    @property
    def residual_sigma(self) -> float:
        """Estimated noise level remaining in the filtered output.

        For white noise of deviation s, the misfit between an MA-k output and
        the raw data is about s*sqrt(1 - 1/k) while the residual noise in the
        output is s/sqrt(k); combining the two gives rms/sqrt(k - 1).
        """
        if self.k <= 1:
            return 0.0
        return self.rms / math.sqrt(self.k - 1)


def _apply(kind: str, series: TimeSeries, k: int) -> TimeSeries:
    if kind not in KINDS:
        raise ValueError(f"unknown filter kind {kind!r}")
    n = len(series)
    if not 1 <= k <= n:
        raise ValueError(f"window k must be in [1, {n}], got {k}")
    windows = sliding_window_view(series.x, k)
    out = windows.mean(axis=1) if kind == "mean" else np.median(windows, axis=1)
    x = np.concatenate([np.zeros(k - 1), out])
    return replace(
        series,
        x=x,
        label=f"filtered({kind},{k})",
        prefix=min(series.prefix + k - 1, n - 1),
    )


def moving_average(series: TimeSeries, k: int) -> TimeSeries:
    """Trailing mean over ``k`` samples; output ``i`` averages samples ``i-k+1 .. i``."""
    return _apply("mean", series, k)


def moving_median(series: TimeSeries, k: int) -> TimeSeries:
    """Trailing median over ``k`` samples; more robust to outliers than the mean."""
    return _apply("median", series, k)


def rms_fit(raw: TimeSeries, filtered: TimeSeries, k: int) -> float:
    """Root-mean-square misfit between filtered and raw samples beyond the prefix.

    Sums squared deviations over 1-based indices ``j = k .. N`` and divides
    by ``N - k`` before taking the square root.
    """
    if len(raw) != len(filtered) or raw.t0 != filtered.t0 or raw.dt != filtered.dt:
        raise ValueError("raw and filtered series must share the same time grid")
    n = len(raw)
    if k < 1:
        raise ValueError(f"window k must be >= 1, got {k}")
    if n - k < 1:
        raise ValueError(f"need N - k >= 1, got N={n}, k={k}")
    d = filtered.x[k - 1 :] - raw.x[k - 1 :]
    return math.sqrt(float(np.dot(d, d)) / (n - k))


def default_k_candidates(series: TimeSeries) -> tuple[int, ...]:
    """Odd windows {3, 5, ...} capped by the series length and the period estimate.

    The cap is ``min(2*floor(spp/10) + 1, n//4)`` where ``spp`` is a rough
    samples-per-period estimate taken from the spacing of sign-change
    clusters in the raw data.
    """
    x = series.x[series.prefix :]
    n = len(series)
    flips = np.flatnonzero(x[:-1] * x[1:] < 0.0)
    if flips.size >= 2:
        # collapse chattering flips into clusters before measuring spacing
        breaks = np.flatnonzero(np.diff(flips) > 8)
        centers = [float(np.median(g)) for g in np.split(flips, breaks + 1)]
        if len(centers) >= 2:
            spp = 2.0 * float(np.median(np.diff(centers)))
        else:
            spp = float(n)
    else:
        spp = float(n)
    kmax = min(2 * (int(spp) // 10) + 1, n // 4)
    if kmax % 2 == 0:
        kmax -= 1
    if kmax < 3:
        return (1,)
    return tuple(range(3, kmax + 1, 2))


def select_smoothing(
    series: TimeSeries,
    kinds=("mean",),
    k_candidates=None,
) -> SmoothingChoice:
    """Evaluate every ``(kind, k)`` candidate and return the RMS argmin.

    Invalid candidates (for example ``k`` too large for the series) are kept
    in the table with a NaN score and an error message; selection fails only
    if every candidate is invalid.
    """
    if k_candidates is None:
        k_candidates = default_k_candidates(series)
    kinds = tuple(kinds)
    if not kinds or not tuple(k_candidates):
        raise ValueError("need at least one kind and one window candidate")
    for kind in kinds:
        if kind not in KINDS:
            raise ValueError(f"unknown filter kind {kind!r}")

    table = []
    best = None
    best_key = None
    for kind in kinds:
        for k in k_candidates:
            try:
                filtered = _apply(kind, series, int(k))
                score = rms_fit(series, filtered, int(k))
            except ValueError as exc:
                table.append(SmoothingCandidate(kind, int(k), math.nan, str(exc)))
                continue
            table.append(SmoothingCandidate(kind, int(k), score))
            key = (score, int(k), _KIND_RANK[kind])
            if best_key is None or key < best_key:
                best_key = key
                best = (kind, int(k), score)
    if best is None:
        raise ValueError("no valid smoothing candidate for this series")
    kind, k, score = best
    return SmoothingChoice(
        kind=kind,
        k=k,
        rms=score,
        delay=(k - 1) / 2.0 * series.dt,
        candidates=tuple(table),
    )


def apply_choice(series: TimeSeries, choice: SmoothingChoice) -> TimeSeries:
    """Apply a previously selected filter to a series."""
    return _apply(choice.kind, series, choice.k)
