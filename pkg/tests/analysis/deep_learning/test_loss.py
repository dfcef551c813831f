import torch
import pytest

from src.analysis.deep_learning import LOSS_WEIGHTS, loss_total
from src.analysis.deep_learning.loss import combine
from src.utils.errors import ShapeError

CONSTANT_SSIM = (2 * 0.21 + 1e-4) / (0.09 + 0.49 + 1e-4)


def test_weights():
    assert LOSS_WEIGHTS == (1.0, 0.5, 0.1)


def test_combine():
    assert combine(0.02, 0.1, 0.05) == pytest.approx(0.075)


def test_perfect_prediction():
    truth = torch.rand(3, 12, 12, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
    parts = loss_total(truth.clone(), truth).as_floats()
    assert parts["total"] == pytest.approx(0.0, abs=1e-12)
    assert parts["mse"] == 0.0 and parts["temporal"] == 0.0


def test_constant_frames():
    pred = torch.full((2, 12, 12), 0.3, dtype=torch.float64)
    truth = torch.full((2, 12, 12), 0.7, dtype=torch.float64)
    parts = loss_total(pred, truth)
    assert float(parts.mse) == pytest.approx(0.16)
    assert float(parts.ssim) == pytest.approx(1 - CONSTANT_SSIM, abs=1e-9)
    assert float(parts.temporal) == 0.0


def test_single_frame_is_flagged():
    pred = torch.full((1, 12, 12), 0.3, dtype=torch.float64)
    parts = loss_total(pred, pred + 0.1)
    assert parts.temporal_flagged
    assert float(parts.temporal) == 0.0


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        loss_total(torch.zeros(2, 12, 12, dtype=torch.float64), torch.zeros(3, 12, 12, dtype=torch.float64))
