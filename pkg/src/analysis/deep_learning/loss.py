"""
Training loss: L = w_mse * MSE + w_ssim * (1 - SSIM) + w_temp * L_temp.

Pixel-mean conventions throughout; SSIM is the same windowed SSIM the
metrics report, averaged over frames.
"""

from dataclasses import dataclass

import torch

from src.analysis.deep_learning.config import LOSS_WEIGHTS
from src.analysis.ssim import ssim_frames
from src.utils.errors import ShapeError
from src.utils.logger import get_logger

logger = get_logger("DynGhostLoss")


@dataclass
class LossBreakdown:
    total: torch.Tensor
    mse: torch.Tensor
    ssim: torch.Tensor
    temporal: torch.Tensor
    temporal_flagged: bool = False

    def as_floats(self) -> dict[str, float]:
        return {
            "total": float(self.total),
            "mse": float(self.mse),
            "ssim": float(self.ssim),
            "temporal": float(self.temporal),
        }


def combine(mse, ssim_term, temporal, weights=LOSS_WEIGHTS):
    return weights[0] * mse + weights[1] * ssim_term + weights[2] * temporal


def loss_total(pred: torch.Tensor, truth, weights=LOSS_WEIGHTS) -> LossBreakdown:
    """``pred`` and ``truth`` are [..., T, H, W]."""
    truth = torch.as_tensor(truth, dtype=pred.dtype)
    if pred.shape != truth.shape:
        raise ShapeError(f"prediction {tuple(pred.shape)} and truth {tuple(truth.shape)} differ")

    mse = torch.mean((pred - truth) ** 2)
    ssim_term = 1.0 - ssim_frames(pred, truth).mean()

    flagged = pred.shape[-3] < 2
    if flagged:
        logger.warning("single-frame sequence: temporal term set to 0")
        temporal = torch.zeros((), dtype=pred.dtype)
    else:
        gap = torch.diff(pred, dim=-3) - torch.diff(truth, dim=-3)
        temporal = torch.mean(gap ** 2)

    total = combine(mse, ssim_term, temporal, weights)
    return LossBreakdown(total=total, mse=mse, ssim=ssim_term, temporal=temporal, temporal_flagged=flagged)
