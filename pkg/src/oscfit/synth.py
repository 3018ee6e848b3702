"""Synthesis of uniformly sampled damped sinusoids and seeded Gaussian noise.

Noise generation is fully deterministic: the same ``NoiseSpec`` on the same
series reproduces the output bit for bit.  The generator is the Philox
(4x64, 10 rounds) counter-based bit generator; normal deviates are produced
from its uniform stream with the Box-Muller transform, so the stream is
reproducible from the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import OscillatorParams, evaluate


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled record; sample ``i`` is taken at ``t0 + i*dt``.

    ``prefix`` counts leading samples that were zeroed by a causal filter and
    must be ignored by downstream consumers; it is 0 for raw data.
    """

    t0: float
    dt: float
    x: np.ndarray
    label: str = "raw"
    prefix: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("need a 1-D series with at least 2 samples")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        if not 0 <= self.prefix < x.size:
            raise ValueError(f"prefix {self.prefix} out of range for {x.size} samples")

    def __len__(self) -> int:
        return self.x.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.x.size)

    @property
    def span(self) -> float:
        """Duration from first to last sample."""
        return self.dt * (self.x.size - 1)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise level (fraction of a reference amplitude) and RNG seed."""

    percent: float
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.percent) and self.percent >= 0.0):
            raise ValueError(f"noise percent must be finite and >= 0, got {self.percent}")


def generate_series(params: OscillatorParams, t0: float, dt: float, n: int) -> TimeSeries:
    """Sample the damped sinusoid on a uniform grid of ``n`` points."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    t = t0 + dt * np.arange(n)
    return TimeSeries(t0=t0, dt=dt, x=evaluate(params, t), label="raw")


def add_gaussian_noise(series: TimeSeries, spec: NoiseSpec, scale_amplitude: float) -> TimeSeries:
    """Add i.i.d. ``Normal(0, (percent * scale_amplitude)^2)`` noise to every sample.

    ``scale_amplitude`` is the reference amplitude the level is relative to;
    callers pass the amplitude constant ``C`` for synthetic data, or the peak
    magnitude for empirical data.
    """
    if not (math.isfinite(scale_amplitude) and scale_amplitude > 0.0):
        raise ValueError(f"scale_amplitude must be finite and > 0, got {scale_amplitude}")
    if spec.percent == 0.0:
        return replace(series, label="noisy")
    rng = np.random.Generator(np.random.Philox(spec.seed))
    n = len(series)
    # Box-Muller on the Philox uniform stream; 1-u maps [0,1) into (0,1]
    u1 = 1.0 - rng.random(n)
    u2 = rng.random(n)
    normals = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    sigma = spec.percent * scale_amplitude
    return replace(series, x=series.x + sigma * normals, label="noisy")
