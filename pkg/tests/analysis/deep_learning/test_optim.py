import pytest
import torch

from src.analysis.deep_learning import AdamWState, adamw_step
from src.utils.errors import ShapeError


def _scalar(value):
    return {"theta": torch.tensor([value], dtype=torch.float64)}


def test_zero_grad_no_decay_is_noop():
    params = _scalar(1.25)
    adamw_step(params, {"theta": torch.zeros(1, dtype=torch.float64)}, AdamWState(lr=0.1, weight_decay=0.0))
    assert params["theta"].item() == 1.25


def test_zero_grad_decay_only():
    params = _scalar(2.0)
    adamw_step(params, {"theta": torch.zeros(1, dtype=torch.float64)}, AdamWState(lr=0.1, weight_decay=0.01))
    assert params["theta"].item() == pytest.approx(2.0 * (1 - 0.1 * 0.01), abs=1e-15)


def test_first_step_by_hand():
    params = _scalar(1.0)
    state = adamw_step(params, {"theta": torch.tensor([0.5], dtype=torch.float64)}, AdamWState(lr=0.1, weight_decay=0.0))
    assert state.step == 1
    assert state.m["theta"].item() == pytest.approx(0.05)
    assert state.v["theta"].item() == pytest.approx(2.5e-4)
    assert params["theta"].item() == pytest.approx(1 - 0.1 * 0.5 / (0.5 + 1e-8), abs=1e-12)


def test_matches_torch_adamw():
    theta = torch.tensor([0.3, -1.2, 2.0], dtype=torch.float64)
    ours = {"w": theta.clone()}
    reference = torch.nn.Parameter(theta.clone())
    opt = torch.optim.AdamW([reference], lr=0.01, betas=(0.9, 0.999), eps=1e-8, weight_decay=0.1)
    state = AdamWState(lr=0.01, weight_decay=0.1)
    for k in range(5):
        g = torch.tensor([0.1 * k, -0.2, 0.05], dtype=torch.float64)
        adamw_step(ours, {"w": g}, state)
        reference.grad = g.clone()
        opt.step()
    assert torch.allclose(ours["w"], reference.detach(), atol=1e-12)


def test_mismatched_gradients():
    with pytest.raises(ShapeError):
        adamw_step(_scalar(1.0), {"other": torch.zeros(1)}, AdamWState())
    with pytest.raises(ShapeError):
        adamw_step(_scalar(1.0), {"theta": torch.zeros(2)}, AdamWState())
