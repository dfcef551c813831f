"""
Shared plumbing for per-frame classical reconstructors.

Solvers work on raw inner products b = Psi x. Buckets stored on the
row-sum-normalised intensity scale are converted with ``b = R * mu``.
"""

import time

import numpy as np

from src.simulation.patterns import PatternSet
from src.utils.errors import ShapeError
from src.utils.logger import get_logger


class ClassicalReconstructor:
    """
    Reconstructs each frame independently from its own bucket row.
    """

    name = "classical"

    def __init__(self, patterns: PatternSet):
        self.patterns = patterns
        self.logger = get_logger(type(self).__name__)
        self.last_timing_ms: list[float] = []

    def solve_frame(self, b: np.ndarray, keep: np.ndarray | None = None) -> np.ndarray:
        """Raw (unclamped) H x W estimate from raw-scale buckets."""
        raise NotImplementedError

    def reconstruct(self, intensities: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        """
        ``intensities`` is [T, M] on the mu scale; returns clamped [T, H, W].
        ``mask`` marks kept entries; dropped rows are left out of each solve.
        """
        intensities = np.asarray(intensities, dtype=np.float64)
        if intensities.ndim == 1:
            intensities = intensities[None, :]
        if intensities.shape[1] != self.patterns.M:
            raise ShapeError(f"buckets have {intensities.shape[1]} entries per frame, patterns have {self.patterns.M}")
        if mask is not None:
            mask = np.asarray(mask, dtype=bool).reshape(intensities.shape)

        raw_scale = intensities * self.patterns.row_sums[None, :]
        frames = []
        self.last_timing_ms = []
        for t in range(raw_scale.shape[0]):
            start = time.perf_counter()
            keep = None if mask is None or mask[t].all() else mask[t]
            frames.append(self.solve_frame(raw_scale[t], keep))
            self.last_timing_ms.append((time.perf_counter() - start) * 1e3)
        return np.clip(np.stack(frames), 0.0, 1.0)

    def get_metadata_dict(self) -> dict:
        return {"method": self.name, "time_ms": self.last_timing_ms}
