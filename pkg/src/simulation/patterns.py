"""
Structured illumination patterns and the sensing matrix built from them.

Speckle patterns are a synthetic stand-in for measured speckle: a white
Gaussian field low-pass filtered with a Gaussian kernel of width
``grain_px`` (periodic boundary), then mapped affinely onto [0, 1] with
one map for the whole set.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from src.core.rng import RngStream, sample_gaussian_array
from src.core.tensor import load_array, save_array
from src.utils.errors import DomainError, ShapeError

_MAX_REDRAWS = 1000


@dataclass
class PatternSet:
    """M illumination patterns of H x W pixels with values in [0, 1]."""

    patterns: np.ndarray
    kind: str = "custom"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        patterns = np.asarray(self.patterns, dtype=np.float64)
        if patterns.ndim != 3 or min(patterns.shape) < 1:
            raise ShapeError(f"patterns must have shape [M, H, W] with positive extents, got {patterns.shape}")
        if not np.all(np.isfinite(patterns)) or patterns.min() < 0.0 or patterns.max() > 1.0:
            raise DomainError("pattern values must lie in [0, 1]")
        sums = patterns.reshape(patterns.shape[0], -1).sum(axis=1)
        if np.any(sums <= 0.0):
            raise DomainError(f"pattern {int(np.argmin(sums))} has row sum 0")
        self.patterns = patterns
        self.row_sums = sums

    @property
    def M(self) -> int:
        return self.patterns.shape[0]

    @property
    def H(self) -> int:
        return self.patterns.shape[1]

    @property
    def W(self) -> int:
        return self.patterns.shape[2]

    def save(self, path: str | Path) -> Path:
        return save_array(self.patterns, path)

    @classmethod
    def load(cls, path: str | Path, kind: str = "custom") -> "PatternSet":
        return cls(patterns=load_array(path), kind=kind)


def _check_extents(M: int, H: int, W: int) -> None:
    if M < 1 or H < 1 or W < 1:
        raise DomainError(f"pattern extents must be positive, got M={M}, H={H}, W={W}")


def generate_speckle(M: int, H: int, W: int, grain_px: float, rng: RngStream) -> PatternSet:
    """
    Low-pass filtered Gaussian fields, one per pattern, mapped onto [0, 1]
    by one affine map shared by the whole set. Grains coarser than the frame
    leave each pattern close to constant.
    """
    _check_extents(M, H, W)
    if grain_px < 1:
        raise DomainError(f"grain_px must be >= 1, got {grain_px}")
    for _ in range(_MAX_REDRAWS):
        fields = np.stack([
            gaussian_filter(sample_gaussian_array(rng, 0.0, 1.0, (H, W)), sigma=grain_px, mode="wrap")
            for _ in range(M)
        ])
        lo, hi = fields.min(), fields.max()
        if hi > lo:
            break
    else:
        raise DomainError(f"could not draw a non-constant speckle field for {H}x{W}")
    patterns = (fields - lo) / (hi - lo)
    return PatternSet(patterns=patterns, kind="speckle", metadata={"grain_px": float(grain_px), "synthetic": True})


def generate_bernoulli(M: int, H: int, W: int, p: float, rng: RngStream) -> PatternSet:
    """I.i.d. {0, 1} patterns with P(1) = p; all-zero patterns are re-drawn."""
    _check_extents(M, H, W)
    if not 0.0 < p < 1.0:
        raise DomainError(f"Bernoulli p must be in (0, 1), got {p}")
    patterns = np.empty((M, H, W), dtype=np.float64)
    for i in range(M):
        for _ in range(_MAX_REDRAWS):
            draw = (rng.uniforms(H * W) <= p).astype(np.float64)
            if draw.any():
                patterns[i] = draw.reshape(H, W)
                break
        else:
            raise DomainError(f"p={p} keeps producing all-zero {H}x{W} patterns")
    return PatternSet(patterns=patterns, kind="bernoulli", metadata={"p": float(p)})


def binarize(ps: PatternSet) -> PatternSet:
    """Threshold each pattern at its own median (>= median becomes 1)."""
    flat = ps.patterns.reshape(ps.M, -1)
    medians = np.median(flat, axis=1, keepdims=True)
    binary = (flat >= medians).astype(np.float64).reshape(ps.patterns.shape)
    return PatternSet(patterns=binary, kind=f"{ps.kind}+binarized", metadata={**ps.metadata, "binarized": True})


def sensing_matrix(ps: PatternSet) -> np.ndarray:
    """Psi: row i is pattern i flattened row-major, shape [M, H*W]."""
    return ps.patterns.reshape(ps.M, ps.H * ps.W)


def sampling_ratio(ps: PatternSet) -> float:
    return ps.M / (ps.H * ps.W)
