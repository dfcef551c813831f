"""
Differentiable SSIM in torch, shared by the evaluation metrics and the
training loss so both report the same number.

11 x 11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1,
valid convolution (no padding), mean over the SSIM map.
"""

import torch
import torch.nn.functional as F

from src.utils.errors import ShapeError

WINDOW_SIZE = 11
SIGMA = 1.5
K1, K2 = 0.01, 0.03
DATA_RANGE = 1.0

SSIM_CONFIG = {"window": WINDOW_SIZE, "sigma": SIGMA, "K1": K1, "K2": K2, "data_range": DATA_RANGE, "padding": "valid"}


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = SIGMA, dtype=torch.float64) -> torch.Tensor:
    """Normalised 2-D Gaussian, shape [1, 1, size, size]."""
    coords = torch.arange(size, dtype=dtype) - (size - 1) / 2
    g = torch.exp(-(coords ** 2) / (2 * sigma ** 2))
    kernel = torch.outer(g, g)
    kernel = kernel / kernel.sum()
    return kernel.unsqueeze(0).unsqueeze(0)


def ssim_frames(x: torch.Tensor, y: torch.Tensor) -> torch.Tensor:
    """
    Mean SSIM per frame for ``x``, ``y`` of shape [..., H, W].
    Returns a tensor with the leading shape.
    """
    if x.shape != y.shape:
        raise ShapeError(f"SSIM inputs differ in shape: {tuple(x.shape)} vs {tuple(y.shape)}")
    H, W = x.shape[-2:]
    if min(H, W) < WINDOW_SIZE:
        raise ShapeError(f"SSIM needs frames of at least {WINDOW_SIZE}x{WINDOW_SIZE}, got {H}x{W}")

    lead = x.shape[:-2]
    x = x.reshape(-1, 1, H, W)
    y = y.reshape(-1, 1, H, W)
    window = gaussian_window(dtype=x.dtype).to(x.device)

    mu_x = F.conv2d(x, window)
    mu_y = F.conv2d(y, window)
    mu_x_sq = mu_x * mu_x
    mu_y_sq = mu_y * mu_y
    mu_xy = mu_x * mu_y

    sigma_x_sq = F.conv2d(x * x, window) - mu_x_sq
    sigma_y_sq = F.conv2d(y * y, window) - mu_y_sq
    sigma_xy = F.conv2d(x * y, window) - mu_xy

    c1 = (K1 * DATA_RANGE) ** 2
    c2 = (K2 * DATA_RANGE) ** 2
    cs_map = (2.0 * sigma_xy + c2) / (sigma_x_sq + sigma_y_sq + c2)
    ssim_map = (2.0 * mu_xy + c1) / (mu_x_sq + mu_y_sq + c1) * cs_map
    return ssim_map.mean(dim=(-1, -2, -3)).reshape(lead)
