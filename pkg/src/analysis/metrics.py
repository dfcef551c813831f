"""
Evaluation metrics: pixel-mean MSE, SSIM, temporal consistency and SNR.
SSIM is computed per frame, then averaged over frames.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import torch
from sklearn.metrics import mean_squared_error

from src.analysis.ssim import SSIM_CONFIG, ssim_frames
from src.simulation.scene import SceneSequence
from src.utils.errors import DomainError, ShapeError


def _frames(x) -> np.ndarray:
    return x.frames if isinstance(x, SceneSequence) else np.asarray(x, dtype=np.float64)


def mse(a, b) -> float:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"MSE inputs differ in shape: {a.shape} vs {b.shape}")
    return float(mean_squared_error(a.reshape(-1), b.reshape(-1)))


def ssim(a, b) -> float:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"SSIM inputs differ in shape: {a.shape} vs {b.shape}")
    with torch.no_grad():
        return float(ssim_frames(torch.from_numpy(a), torch.from_numpy(b)))


def ssim_per_frame(pred, truth) -> list[float]:
    pred, truth = _frames(pred), _frames(truth)
    if pred.shape != truth.shape:
        raise ShapeError(f"sequences differ in shape: {pred.shape} vs {truth.shape}")
    with torch.no_grad():
        return ssim_frames(torch.from_numpy(pred), torch.from_numpy(truth)).tolist()


def temporal_consistency(pred, truth) -> float:
    """Mean over frame pairs of the pixel-mean squared gap between predicted and true differences."""
    pred, truth = _frames(pred), _frames(truth)
    if pred.shape != truth.shape:
        raise ShapeError(f"sequences differ in shape: {pred.shape} vs {truth.shape}")
    if pred.shape[0] < 2:
        raise DomainError("temporal consistency needs at least 2 frames")
    gap = np.diff(pred, axis=0) - np.diff(truth, axis=0)
    return float(np.mean(np.square(gap)))


def snr_db(signal, noisy) -> float:
    signal = np.asarray(signal, dtype=np.float64)
    noisy = np.asarray(noisy, dtype=np.float64)
    power = float(np.mean(np.square(signal)))
    if power <= 0.0:
        raise DomainError("signal must not be all-zero")
    noise = float(np.mean(np.square(noisy - signal)))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(power / noise)


@dataclass
class MetricsReport:
    method: str
    mse: list[float]
    ssim: list[float]
    temporal_consistency: float | None = None
    time_ms: float = 0.0
    ssim_config: dict = field(default_factory=lambda: dict(SSIM_CONFIG))

    @property
    def mse_mean(self) -> float:
        return float(np.mean(self.mse))

    @property
    def mse_std(self) -> float:
        return float(np.std(self.mse))

    @property
    def ssim_mean(self) -> float:
        return float(np.mean(self.ssim))

    @property
    def ssim_std(self) -> float:
        return float(np.std(self.ssim))

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload.update(mse_mean=self.mse_mean, mse_std=self.mse_std, ssim_mean=self.ssim_mean, ssim_std=self.ssim_std)
        return payload


def evaluate_sequence(method: str, pred, truth, time_ms: float = 0.0) -> MetricsReport:
    pred, truth = _frames(pred), _frames(truth)
    per_mse = [mse(p, t) for p, t in zip(pred, truth)]
    per_ssim = ssim_per_frame(pred, truth)
    tc = temporal_consistency(pred, truth) if pred.shape[0] >= 2 else None
    return MetricsReport(method=method, mse=per_mse, ssim=per_ssim, temporal_consistency=tc, time_ms=time_ms)
