"""
Photon-counting bucket detectors.

Per entry, in this draw order from the supplied stream:

    n ~ Poisson(mu * n_bar * efficiency)      signal
    d ~ Poisson(dark_count_rate * dt)         dark counts
    a ~ Binomial(n + d, afterpulse_prob)      one generation of afterpulses
    c ~ Binomial(n + d + a, crosstalk_prob)   one generation of crosstalk
    raw = n + d + a + c

followed by a non-paralyzable dead-time cap per integration window.
Timing jitter is recorded on the spec but has no effect on counts.
"""

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.core.rng import RngStream, sample_binomial, sample_poisson
from src.simulation.measurement import BucketSeries
from src.utils.errors import ConfigError, DomainError

DEFAULT_INTEGRATION_TIME = 1e-3


class DetectorSpec(BaseModel):
    """Physical parameters of a single-photon bucket detector."""

    name: str
    efficiency: float = Field(..., gt=0.0, le=1.0)
    dark_count_rate: float = Field(..., ge=0.0, description="Hz")
    dead_time_ns: float = Field(0.0, ge=0.0)
    afterpulse_prob: float = Field(0.0, ge=0.0, lt=1.0)
    crosstalk_prob: float = Field(0.0, ge=0.0, lt=1.0)
    timing_jitter_ps: float = Field(0.0, ge=0.0)
    integration_time: float = Field(DEFAULT_INTEGRATION_TIME, gt=0.0, description="seconds")

    @property
    def dark_mean(self) -> float:
        return self.dark_count_rate * self.integration_time

    @property
    def count_cap(self) -> int | None:
        if self.dead_time_ns == 0:
            return None
        # small epsilon so 1e-3 / 40e-9 lands on 25000 and not 24999
        return math.floor(self.integration_time * 1e9 / self.dead_time_ns + 1e-9)


PRESETS: dict[str, dict] = {
    "snspd": dict(efficiency=0.95, dark_count_rate=10.0, dead_time_ns=40.0,
                  afterpulse_prob=0.0, crosstalk_prob=0.0, timing_jitter_ps=50.0),
    "spad": dict(efficiency=0.70, dark_count_rate=1000.0, dead_time_ns=50.0,
                 afterpulse_prob=0.01, crosstalk_prob=0.0, timing_jitter_ps=300.0),
    "sipm": dict(efficiency=0.50, dark_count_rate=100000.0, dead_time_ns=20.0,
                 afterpulse_prob=0.02, crosstalk_prob=0.05, timing_jitter_ps=100.0),
}


def preset(name: str, integration_time: float = DEFAULT_INTEGRATION_TIME) -> DetectorSpec:
    key = name.lower()
    if key not in PRESETS:
        raise ConfigError(f"Unknown detector '{name}'. Available: {', '.join(PRESETS)}")
    return DetectorSpec(name=key, integration_time=integration_time, **PRESETS[key])


def apply_dead_time(raw_count: int, spec: DetectorSpec) -> int:
    if raw_count < 0:
        raise DomainError(f"raw count must be >= 0, got {raw_count}")
    cap = spec.count_cap
    return int(raw_count) if cap is None else min(int(raw_count), cap)


def _entry(rng: RngStream, rate: float, spec: DetectorSpec) -> int:
    n = sample_poisson(rng, rate)
    d = sample_poisson(rng, spec.dark_mean)
    a = sample_binomial(rng, n + d, spec.afterpulse_prob)
    c = sample_binomial(rng, n + d + a, spec.crosstalk_prob)
    return apply_dead_time(n + d + a + c, spec)


def detect_counts(
    mu: np.ndarray,
    n_bar: float,
    spec: DetectorSpec,
    rng: RngStream | Sequence[RngStream],
) -> BucketSeries:
    """
    Photon counts for every entry of ``mu`` [T, M].

    ``rng`` is either one stream used row-major over all entries, or one
    stream per frame.
    """
    mu = np.asarray(mu, dtype=np.float64)
    if mu.ndim != 2:
        mu = mu.reshape(1, -1)
    if not np.all(np.isfinite(mu)) or mu.min() < 0.0 or mu.max() > 1.0:
        raise DomainError("mu must lie in [0, 1]")
    if not n_bar > 0:
        raise DomainError(f"n_bar must be > 0, got {n_bar}")

    T, M = mu.shape
    streams = list(rng) if isinstance(rng, (list, tuple)) else [rng] * T
    if len(streams) != T:
        raise DomainError(f"got {len(streams)} streams for {T} frames")

    scale = n_bar * spec.efficiency
    counts = np.empty((T, M), dtype=np.float64)
    for t in range(T):
        stream = streams[t]
        for i in range(M):
            counts[t, i] = _entry(stream, mu[t, i] * scale, spec)

    return BucketSeries(
        values=counts,
        mode="counts",
        detector=spec.name,
        seed=streams[0].master_seed,
        n_bar=float(n_bar),
        spec=spec.model_dump(),
    )


def signal_to_dark_ratio(mu_mean: float, n_bar: float, spec: DetectorSpec) -> float:
    dark = spec.dark_mean
    if dark == 0.0:
        return math.inf
    return (mu_mean * n_bar * spec.efficiency) / dark


def counts_to_intensity(counts: np.ndarray, n_bar: float, spec: DetectorSpec) -> np.ndarray:
    """Moment estimate of mu from counts: (counts - dark mean) / (n_bar * efficiency), clipped to [0, 1]."""
    estimate = (np.asarray(counts, dtype=np.float64) - spec.dark_mean) / (n_bar * spec.efficiency)
    return np.clip(estimate, 0.0, 1.0)
