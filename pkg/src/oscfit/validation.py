"""Input validation helpers shared by the estimator API and the CLI."""

from __future__ import annotations

import numpy as np

from .exceptions import NonUniformSpacingError, TooShortError


def signal_1d(X, name: str = "X") -> np.ndarray:
    """Coerce ``(n,)`` or ``(n, 1)`` input to a 1-D float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def uniform_time_grid(t: np.ndarray, rel_tol: float = 1e-3) -> tuple[float, float]:
    """Validate a strictly increasing, uniform time grid; return ``(t0, dt)``.

    ``dt`` is the median spacing; any spacing deviating from it by more than
    ``rel_tol`` (relative) fails with the worst offending index.
    """
    if t.size < 2:
        raise TooShortError("need at least 2 samples")
    steps = np.diff(t)
    if np.any(steps <= 0.0):
        worst = int(np.argmin(steps))
        raise NonUniformSpacingError(worst, f"time stamps not strictly increasing at index {worst}")
    dt = float(np.median(steps))
    deviation = np.abs(steps - dt)
    worst = int(np.argmax(deviation))
    if deviation[worst] > rel_tol * dt:
        raise NonUniformSpacingError(
            worst,
            f"non-uniform sampling: spacing at index {worst} is {steps[worst]:.6g}, "
            f"median is {dt:.6g}",
        )
    return float(t[0]), dt
