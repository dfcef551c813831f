"""
Orthonormal 2-D DCT and the soft-threshold proximal operator.
"""

import numpy as np
from scipy.fft import dctn, idctn


def dct2(image: np.ndarray) -> np.ndarray:
    return dctn(np.asarray(image, dtype=np.float64), type=2, norm="ortho")


def idct2(coefficients: np.ndarray) -> np.ndarray:
    return idctn(np.asarray(coefficients, dtype=np.float64), type=2, norm="ortho")


def soft_threshold(v, tau: float):
    """sign(v) * max(|v| - tau, 0), for scalars or arrays."""
    out = np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)
    return float(out) if np.ndim(out) == 0 else out
