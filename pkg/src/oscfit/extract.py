"""Characteristic time points of a sampled oscillation.

Recovers zero-crossing times (with direction), the half-period midpoints
where the curve is tangent to the decay envelope, and the leading tangent
point extrapolated a quarter period before the first crossing.

Crossing detection walks a hysteresis state machine over the samples: a
crossing is registered only when the signal decisively changes side of a
dead band around zero.  On clean data this reduces to plain linear
interpolation between the two samples straddling zero (a sign change exactly
at a sample returns that sample's time).  Under residual noise, chattering
flips are collapsed into one crossing per cluster and the time is re-fitted
with a short least-squares line, which keeps the located crossing unbiased
without resorting to curvature fitting.

All returned times are in signal time: the filter group delay passed by the
caller is subtracted from every located time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import NoCrossingsError
from .synth import TimeSeries


@dataclass(frozen=True)
class EnvelopePoint:
    """A tangency point ``t ~ t_{k*pi/2}`` (k odd) with the sampled envelope magnitude.

    ``magnitude`` is None when the point falls outside the usable samples
    (for example inside the zeroed filter prefix).  ``sign`` is +1 for a
    peak and -1 for a valley.
    """

    time: float
    magnitude: float | None
    sign: int
    k: int


@dataclass(frozen=True)
class CrossingSet:
    """Ordered zero crossings plus derived envelope points.

    ``directions[i]`` is -1 for a falling and +1 for a rising crossing;
    ``indices[i]`` is the crossing counter ``k`` such that
    ``times[i] ~ (k*pi - phi)/alpha`` (odd k falling, even k rising).
    ``delay_correction`` was already subtracted from every stored time, so
    sampling the originating series requires adding it back.
    """

    times: np.ndarray
    directions: np.ndarray
    indices: np.ndarray
    midpoints: tuple[EnvelopePoint, ...] = ()
    leading: EnvelopePoint | None = None
    delay_correction: float = 0.0
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        dirs = np.array(self.directions, dtype=int)
        idx = np.array(self.indices, dtype=int)
        if not (times.size == dirs.size == idx.size):
            raise ValueError("times, directions and indices must have equal length")
        if times.size and np.any(np.diff(times) <= 0.0):
            raise ValueError("crossing times must be strictly increasing")
        if np.any(np.abs(dirs) != 1):
            raise ValueError("directions must be +1 (rising) or -1 (falling)")
        if np.any(np.diff(idx) < 1):
            raise ValueError("crossing indices must be strictly increasing")
        # odd crossings are falling, even ones rising
        if np.any(dirs != np.where(idx % 2 == 0, 1, -1)):
            raise ValueError("crossing directions do not match index parity")
        for arr, name in ((times, "times"), (dirs, "directions"), (idx, "indices")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.times.size

    def envelope_points(self) -> tuple[EnvelopePoint, ...]:
        """Leading tangent point (when available) followed by the midpoints."""
        pts = list(self.midpoints)
        if self.leading is not None and self.leading.magnitude is not None:
            pts.insert(0, self.leading)
        return tuple(pts)

    def with_leading(self, point: EnvelopePoint | None) -> "CrossingSet":
        return replace(self, leading=point)


def sample_at(series: TimeSeries, t: float) -> float | None:
    """Linear interpolation of the series at raw time ``t``.

    Returns None outside the usable range (before the zeroed prefix or after
    the last sample).
    """
    lo = series.t0 + series.prefix * series.dt
    hi = series.t0 + (len(series) - 1) * series.dt
    if not lo <= t <= hi:
        return None
    return float(np.interp(t, series.times[series.prefix :], series.x[series.prefix :]))


def _segment_zeros(x: np.ndarray, t: np.ndarray, a: int, b: int) -> list[float]:
    """Interpolated zeros of the piecewise-linear samples between indices a and b."""
    zeros = []
    for m in range(a, b):
        if x[m] == 0.0:
            zeros.append(float(t[m]))
        elif x[m] * x[m + 1] < 0.0:
            zeros.append(float(t[m] + (t[m + 1] - t[m]) * x[m] / (x[m] - x[m + 1])))
    return zeros


def _refine_crossing(t: np.ndarray, x: np.ndarray, tc: float, direction: int, window: float) -> float:
    """Re-fit a chattered crossing as the zero of a local least-squares line.

    The window is clipped symmetrically at the record edges (an asymmetric
    window would let the sine's curvature bias the intercept) and the fit is
    iterated so the window is centered on its own zero.
    """
    dt = t[1] - t[0]
    for _ in range(4):
        w = min(window, tc - t[0], t[-1] - tc)
        if w < 4.0 * dt:
            return tc
        sel = np.abs(t - tc) <= w
        if np.count_nonzero(sel) < 5:
            return tc
        z = t[sel] - tc
        slope, intercept = np.polyfit(z, x[sel], 1)
        if slope * direction <= 0.0:
            return tc
        shift = -intercept / slope
        if abs(shift) > w:
            return tc
        tc = tc + shift
        if abs(shift) < 1e-3 * dt:
            break
    return tc


def _assign_indices(times: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """Crossing counters k with parity matching direction (odd falling, even rising)."""
    k0 = 1 if directions[0] < 0 else 2
    if times.size == 1:
        return np.array([k0])
    gaps = np.diff(times)
    half = float(np.median(gaps))
    steps = []
    for gap, d1, d2 in zip(gaps, directions[:-1], directions[1:]):
        n = max(1, round(gap / half))
        want_odd = d1 != d2
        if (n % 2 == 1) != want_odd:
            lower = n - 1 if n - 1 >= 1 else n + 1
            n = lower if abs(gap / half - lower) <= abs(gap / half - (n + 1)) else n + 1
        steps.append(n)
    return k0 + np.concatenate([[0], np.cumsum(steps)])


def find_zero_crossings(
    series: TimeSeries,
    delay: float = 0.0,
    *,
    hysteresis: float = 0.01,
    noise_band: float = 0.0,
    min_separation_frac: float = 0.1,
    refine: bool = True,
) -> CrossingSet:
    """Locate the zero crossings of a sampled oscillation.

    Parameters
    ----------
    series : TimeSeries
        Input samples; the zeroed filter prefix is excluded.
    delay : float
        Filter group delay to subtract from every located time.
    hysteresis : float
        Dead-band half-width as a fraction of the peak magnitude.
    noise_band : float
        Absolute dead-band floor; the effective band is the larger of the
        two.  Callers with a residual-noise estimate pass a multiple of it.
    min_separation_frac : float
        Crossings closer than this fraction of the estimated period are
        treated as chatter and merged.
    refine : bool
        Re-fit chattered crossings with a local least-squares line.

    Raises
    ------
    NoCrossingsError
        If fewer than two sign changes survive; the series is too short,
        all one sign, or looks overdamped.
    """
    x = series.x[series.prefix :]
    t = series.times[series.prefix :]
    if x.size < 2:
        raise NoCrossingsError("series too short after removing the filter prefix")
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        raise NoCrossingsError("series is identically zero")
    band = max(hysteresis * scale, noise_band)

    state = np.zeros(x.size, dtype=int)
    state[x > band] = 1
    state[x < -band] = -1
    decisive = np.flatnonzero(state)
    if decisive.size == 0:
        raise NoCrossingsError("no sample leaves the hysteresis band")

    events = []  # (time, direction, zero count in the traverse)
    cur = state[decisive[0]]
    prev = decisive[0]
    for i in decisive[1:]:
        if state[i] == cur:
            prev = int(i)
            continue
        zeros = _segment_zeros(x, t, prev, int(i))
        tc = zeros[0] if len(zeros) == 1 else float(np.median(zeros))
        events.append((tc, int(state[i]), len(zeros)))
        cur = state[i]
        prev = int(i)
    if len(events) < 2:
        raise NoCrossingsError(f"found {len(events)} sign changes, need at least 2")

    ev_times = np.array([e[0] for e in events])
    ev_dirs = np.array([e[1] for e in events])
    ev_zeros = np.array([e[2] for e in events])

    # period scale from the gap structure: chatter gaps are far smaller than
    # the clean half-period gaps, so take the median of the large ones
    gaps = np.diff(ev_times)
    large = gaps[gaps >= gaps.max() / 2.0]
    half_period = float(np.median(large))
    threshold = min_separation_frac * 2.0 * half_period

    crossings = []  # (time, direction, chattered)
    start = 0
    for stop in range(1, len(events) + 1):
        if stop < len(events) and ev_times[stop] - ev_times[stop - 1] < threshold:
            continue
        count = stop - start
        if count % 2 == 1:  # even-count clusters flip back: noise blips, dropped
            tc = float(np.median(ev_times[start:stop]))
            chattered = count > 1 or bool(np.any(ev_zeros[start:stop] > 1))
            crossings.append((tc, int(ev_dirs[stop - 1]), chattered))
        start = stop
    if len(crossings) < 2:
        raise NoCrossingsError("fewer than 2 crossings remain after merging chatter")

    notes = []
    times = np.array([c[0] for c in crossings])
    dirs = np.array([c[1] for c in crossings])
    if refine:
        window = 2.0 * float(np.median(np.diff(times))) / 12.0
        for j, (tc, direction, chattered) in enumerate(crossings):
            if not chattered:
                continue
            times[j] = _refine_crossing(t, x, tc, direction, window)
        order = np.argsort(times)
        times, dirs = times[order], dirs[order]
        if np.any(np.diff(times) <= 0.0):
            # refinement produced a collision; fall back to unrefined times
            times = np.array([c[0] for c in crossings])
            dirs = np.array([c[1] for c in crossings])
            notes.append("crossing refinement discarded (ordering collision)")

    indices = _assign_indices(times, dirs)
    gaps = np.diff(times)
    if gaps.size >= 2:
        mean_gap = float(np.mean(gaps))
        if np.any(np.abs(gaps - mean_gap) > 0.1 * mean_gap):
            notes.append("crossing gaps deviate more than 10% from their mean")

    return CrossingSet(
        times=times - delay,
        directions=dirs,
        indices=indices,
        delay_correction=delay,
        notes=tuple(notes),
    )


def locate_midpoints(cset: CrossingSet, series: TimeSeries) -> CrossingSet:
    """Fill in the half-period midpoints between adjacent crossings.

    The midpoint of two adjacent crossings is where the sine factor is
    exactly +-1, so the series value there is (up to noise) the signed
    envelope magnitude.  A local peak search would land on the earlier
    stationary point instead; the midpoint is the tangency.
    """
    if len(cset) < 2:
        raise NoCrossingsError("need at least 2 crossings to place midpoints")
    points = []
    for i in range(len(cset) - 1):
        if cset.indices[i + 1] - cset.indices[i] != 1:
            continue  # a crossing was skipped in between: not a tangency midpoint
        tm = 0.5 * (cset.times[i] + cset.times[i + 1])
        value = sample_at(series, tm + cset.delay_correction)
        if value is None:
            continue
        points.append(
            EnvelopePoint(
                time=float(tm),
                magnitude=abs(value),
                sign=1 if cset.directions[i] > 0 else -1,
                k=int(cset.indices[i] + cset.indices[i + 1]),
            )
        )
    return replace(cset, midpoints=tuple(points))


def leading_tangent_point(cset: CrossingSet, series: TimeSeries, period: float) -> EnvelopePoint:
    """Extrapolate the tangency a quarter period before the first crossing.

    The magnitude is read from the series when the time falls inside the
    usable sampled range and is None otherwise (a moving-average prefix may
    cover it).
    """
    if len(cset) < 1:
        raise NoCrossingsError("need at least 1 crossing")
    time = float(cset.times[0] - period / 4.0)
    value = sample_at(series, time + cset.delay_correction)
    return EnvelopePoint(
        time=time,
        magnitude=abs(value) if value is not None else None,
        sign=1 if cset.directions[0] < 0 else -1,
        k=int(2 * cset.indices[0] - 1),
    )
