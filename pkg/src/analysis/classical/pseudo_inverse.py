"""
Moore-Penrose pseudo-inverse reconstruction via a truncated SVD.

Singular values below ``1e-10 * s_max`` are dropped. The factorisation is
cached per pattern set, so the first frame pays the SVD (cold) and the rest
only two matrix products (warm).
"""

import hashlib
import time

import numpy as np
from scipy.linalg import svd

from src.analysis.classical.base import ClassicalReconstructor
from src.simulation.patterns import PatternSet, sensing_matrix
from src.utils.errors import ShapeError

RCOND = 1e-10
_CACHE_SIZE = 8
_svd_cache: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _fingerprint(matrix: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(matrix).tobytes() + str(matrix.shape).encode()).hexdigest()


def truncated_svd(matrix: np.ndarray, use_cache: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(U, s_inv, Vt)`` with reciprocal singular values, zeroed below the cutoff."""
    key = _fingerprint(matrix) if use_cache else None
    if key is not None and key in _svd_cache:
        return _svd_cache[key]
    U, s, Vt = svd(matrix, full_matrices=False)
    cutoff = RCOND * (s[0] if s.size else 0.0)
    s_inv = np.zeros_like(s)
    kept = s > cutoff
    s_inv[kept] = 1.0 / s[kept]
    result = (U, s_inv, Vt)
    if key is not None:
        if len(_svd_cache) >= _CACHE_SIZE:
            _svd_cache.pop(next(iter(_svd_cache)))
        _svd_cache[key] = result
    return result


def clear_cache() -> None:
    _svd_cache.clear()


def pseudo_inverse_raw(ps: PatternSet, b: np.ndarray, keep: np.ndarray | None = None) -> np.ndarray:
    """Minimum-norm least-squares solution of Psi x = b, unclamped, shape [H, W]."""
    Psi = sensing_matrix(ps)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.size != ps.M:
        raise ShapeError(f"expected {ps.M} buckets, got {b.size}")
    if keep is not None:
        U, s_inv, Vt = truncated_svd(Psi[keep], use_cache=False)
        b = b[keep]
    else:
        U, s_inv, Vt = truncated_svd(Psi)
    x = Vt.T @ (s_inv * (U.T @ b))
    return x.reshape(ps.H, ps.W)


def pseudo_inverse(ps: PatternSet, b: np.ndarray) -> np.ndarray:
    return np.clip(pseudo_inverse_raw(ps, b), 0.0, 1.0)


class PseudoInverseReconstructor(ClassicalReconstructor):
    name = "pi"

    def __init__(self, patterns: PatternSet):
        super().__init__(patterns)
        clear_cache()
        start = time.perf_counter()
        truncated_svd(sensing_matrix(patterns))
        self.cold_ms = (time.perf_counter() - start) * 1e3
        self.logger.info(f"SVD of {patterns.M}x{patterns.H * patterns.W} sensing matrix took {self.cold_ms:.2f} ms")

    def solve_frame(self, b, keep=None):
        return pseudo_inverse_raw(self.patterns, b, keep)

    def get_metadata_dict(self) -> dict:
        warm = float(np.mean(self.last_timing_ms)) if self.last_timing_ms else None
        return {**super().get_metadata_dict(), "cold_ms": self.cold_ms, "warm_ms": warm, "rcond": RCOND}
