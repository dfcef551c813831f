import pytest
import torch

from src.analysis.deep_learning import DynGhost, backward, dynghost_loss_fn, gradient_check, gradients
from src.analysis.deep_learning.model import DTYPE, as_tensor
from src.utils.errors import DomainError


def test_unused_temporal_rows_have_zero_gradient(tiny_config, tiny_item):
    patterns, buckets, truth = tiny_item
    model = DynGhost(tiny_config.model_copy(update={"max_frames": 5}))
    grads = backward(model, patterns, buckets, truth)
    assert not grads["pe_temporal"][3:].any()
    assert grads["pe_temporal"][:3].abs().sum() > 0


def test_gradients_scale_linearly(tiny_config, tiny_item):
    patterns, buckets, truth = tiny_item
    model = DynGhost(tiny_config)
    once = backward(model, patterns, buckets, truth)
    twice = backward(model, patterns, buckets, truth, scale=2.0)
    for name in once:
        assert torch.allclose(twice[name], 2.0 * once[name], atol=1e-12, rtol=0)


def test_gradients_cover_every_parameter(tiny_config, tiny_item):
    patterns, buckets, truth = tiny_item
    model = DynGhost(tiny_config)
    grads = gradients(model, dynghost_loss_fn(as_tensor(patterns), as_tensor(buckets), as_tensor(truth)))
    assert set(grads) == {name for name, _ in model.named_parameters()}


@pytest.mark.parametrize("h", [1e-5, 2e-5])
def test_gradient_check_passes(tiny_config, tiny_item, h):
    patterns, buckets, truth = tiny_item
    model = DynGhost(tiny_config)
    loss_fn = dynghost_loss_fn(as_tensor(patterns), as_tensor(buckets), as_tensor(truth))
    report = gradient_check(model, loss_fn, probe_count=200, h=h)
    assert len(report.probes) == 200
    assert report.passed(), report.max_relative_error
    assert report.to_dict()["passed"] is True


def test_gradient_check_on_quadratic():
    layer = torch.nn.Linear(3, 1, dtype=DTYPE)
    x = torch.tensor([[0.2, -0.4, 0.9]], dtype=DTYPE)
    report = gradient_check(layer, lambda m: torch.mean((m(x) - 1.0) ** 2), probe_count=20)
    assert report.max_relative_error < 1e-8


def test_gradient_check_leaves_parameters_untouched(tiny_config, tiny_item):
    patterns, buckets, truth = tiny_item
    model = DynGhost(tiny_config)
    before = {n: p.detach().clone() for n, p in model.named_parameters()}
    gradient_check(model, dynghost_loss_fn(as_tensor(patterns), as_tensor(buckets), as_tensor(truth)), probe_count=10)
    assert all(torch.equal(before[n], p) for n, p in model.named_parameters())


def test_gradient_check_step_range(tiny_config):
    model = DynGhost(tiny_config)
    with pytest.raises(DomainError):
        gradient_check(model, lambda m: sum(p.sum() for p in m.parameters()), h=1e-3)


@pytest.mark.slow
def test_gradient_check_at_benchmark_size(toy_model_config, toy_item):
    patterns, buckets, truth = toy_item
    model = DynGhost(toy_model_config)
    loss_fn = dynghost_loss_fn(as_tensor(patterns), as_tensor(buckets), as_tensor(truth))
    report = gradient_check(model, loss_fn, probe_count=200, h=1e-5)
    assert len(report.probes) == 200
    assert report.max_relative_error < 1e-4
