"""
Differential ghost imaging.

    x = <b H> - (<b> / <R>) <R H>

with <.> the mean over patterns and R_i the pattern row sums. The result is
rescaled affinely to [0, 1]; a constant estimate maps to all zeros.
"""

import numpy as np

from src.analysis.classical.base import ClassicalReconstructor
from src.simulation.patterns import PatternSet, sensing_matrix
from src.utils.errors import DomainError, ShapeError


def dgi_raw(ps: PatternSet, b: np.ndarray, keep: np.ndarray | None = None) -> np.ndarray:
    """DGI estimate before rescaling, shape [H, W]."""
    Psi = sensing_matrix(ps)
    R = ps.row_sums
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.size != ps.M:
        raise ShapeError(f"expected {ps.M} buckets, got {b.size}")
    if keep is not None:
        Psi, R, b = Psi[keep], R[keep], b[keep]
    if b.size == 0:
        raise DomainError("DGI needs at least one measurement")
    x = (b @ Psi) / b.size - (b.mean() / R.mean()) * ((R @ Psi) / b.size)
    return x.reshape(ps.H, ps.W)


def rescale_unit(x: np.ndarray) -> np.ndarray:
    lo, hi = float(x.min()), float(x.max())
    if hi <= lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def dgi(ps: PatternSet, b: np.ndarray) -> np.ndarray:
    return rescale_unit(dgi_raw(ps, b))


class DGIReconstructor(ClassicalReconstructor):
    name = "dgi"

    def solve_frame(self, b, keep=None):
        return rescale_unit(dgi_raw(self.patterns, b, keep))
