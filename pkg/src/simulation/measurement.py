"""
Ideal forward model and the analog (Gaussian) bucket detector.

mu[t, i] = <H_i, x_t> / R_i with R_i the row sum of pattern i, so mu lies in
[0, 1] and mu * n_bar reads as a fraction of the photon budget.

SNR is defined on mean signal power: snr_db = 10 log10(mean(mu^2) / sigma^2).
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np

from src.core.rng import RngStream, sample_gaussian_array
from src.core.tensor import load_array, save_array
from src.simulation.patterns import PatternSet, sensing_matrix
from src.simulation.scene import SceneSequence
from src.utils.errors import DomainError, ShapeError
from src.utils.io import read_json, write_json


@dataclass
class BucketSeries:
    """T x M detector outputs plus provenance."""

    values: np.ndarray
    mode: Literal["analog", "counts"] = "analog"
    detector: str = "classical"
    seed: int | None = None
    n_bar: float | None = None
    sigma: float | None = None
    spec: dict[str, Any] | None = None
    mask: np.ndarray | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"bucket values must have shape [T, M], got {values.shape}")
        if self.mode == "analog":
            if values.size and (values.min() < 0.0 or values.max() > 1.0):
                raise DomainError("analog bucket values must lie in [0, 1]")
        elif self.mode == "counts":
            if values.size and (values.min() < 0 or np.any(values != np.round(values))):
                raise DomainError("counts must be non-negative integers")
        else:
            raise DomainError(f"unknown bucket mode '{self.mode}'")
        self.values = values
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool).reshape(values.shape)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def M(self) -> int:
        return self.values.shape[1]

    def sidecar(self) -> dict[str, Any]:
        payload = {
            "mode": self.mode,
            "detector": self.detector,
            "seed": self.seed,
            "n_bar": self.n_bar,
            "sigma": self.sigma,
        }
        if self.spec is not None:
            payload["spec"] = self.spec
        payload.update(self.extra)
        return payload


def save_buckets(bs: BucketSeries, path: str | Path) -> Path:
    """GTF [T, M] at ``path`` plus ``<stem>.json`` next to it."""
    path = Path(path)
    save_array(bs.values, path)
    write_json(path.with_suffix(".json"), bs.sidecar())
    return path


def load_buckets(path: str | Path) -> BucketSeries:
    path = Path(path)
    meta = read_json(path.with_suffix(".json"))
    extra = {k: v for k, v in meta.items() if k not in ("mode", "detector", "seed", "n_bar", "sigma", "spec")}
    return BucketSeries(
        values=load_array(path),
        mode=meta["mode"],
        detector=meta["detector"],
        seed=meta.get("seed"),
        n_bar=meta.get("n_bar"),
        sigma=meta.get("sigma"),
        spec=meta.get("spec"),
        extra=extra,
    )


def ideal_intensity(ps: PatternSet, seq: SceneSequence) -> np.ndarray:
    """Row-sum normalised inner products, shape [T, M]."""
    if (seq.H, seq.W) != (ps.H, ps.W):
        raise ShapeError(f"scene is {seq.H}x{seq.W} but patterns are {ps.H}x{ps.W}")
    frames = seq.frames.reshape(seq.T, -1)
    mu = frames @ sensing_matrix(ps).T / ps.row_sums[None, :]
    return np.clip(mu, 0.0, 1.0)


def gaussian_noise(mu: np.ndarray, sigma: float, rng: RngStream) -> np.ndarray:
    """mu + eps with i.i.d. eps ~ N(0, sigma^2), before any clipping."""
    if sigma < 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    mu = np.asarray(mu, dtype=np.float64)
    if sigma == 0:
        return mu.copy()
    return mu + sample_gaussian_array(rng, 0.0, sigma, mu.shape)


def classical_detect(mu: np.ndarray, sigma: float, rng: RngStream) -> BucketSeries:
    """b = clip(mu + eps, 0, 1)."""
    noisy = gaussian_noise(mu, sigma, rng)
    return BucketSeries(
        values=np.clip(noisy, 0.0, 1.0),
        mode="analog",
        detector="classical",
        seed=rng.master_seed,
        sigma=float(sigma),
    )


def sigma_for_snr(mu: np.ndarray, snr_db: float) -> float:
    power = float(np.mean(np.square(mu)))
    if power <= 0.0:
        raise DomainError("cannot set an SNR for an all-zero signal")
    return math.sqrt(power / 10.0 ** (snr_db / 10.0))


def drop_measurements(values: np.ndarray, rate: float, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """
    Zero a Bernoulli(rate) subset of entries.

    Returns the masked values and a boolean ``keep`` mask of the same shape.
    """
    if not 0.0 <= rate < 1.0:
        raise DomainError(f"drop rate must be in [0, 1), got {rate}")
    values = np.asarray(values, dtype=np.float64)
    if rate == 0.0:
        return values.copy(), np.ones(values.shape, dtype=bool)
    keep = rng.uniforms(values.size).reshape(values.shape) > rate
    return np.where(keep, values, 0.0), keep
