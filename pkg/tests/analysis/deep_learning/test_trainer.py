import numpy as np
import pytest
import torch

from src.analysis.deep_learning import (
    ABLATION_VARIANTS,
    DynGhost,
    TrainingConfig,
    TrainingItem,
    ablation_variant,
    load_checkpoint,
    loss_total,
    predict,
    save_checkpoint,
    train,
)
from src.analysis.deep_learning.trainer import shuffle_order
from src.analysis.metrics import ssim
from src.core.rng import rng_substream
from src.utils.errors import ConfigError, DomainError


def _items(tiny_item, n=3):
    patterns, buckets, truth = tiny_item
    return [TrainingItem(patterns=patterns, buckets=buckets, truth=truth) for _ in range(n)]


def test_shuffle_is_a_permutation():
    order = shuffle_order(10, rng_substream(7, 0))
    assert sorted(order) == list(range(10))
    assert order == shuffle_order(10, rng_substream(7, 0))


def test_zero_learning_rate_freezes_parameters(tiny_config, tiny_item):
    model = DynGhost(tiny_config)
    before = {n: p.detach().clone() for n, p in model.named_parameters()}
    train(model, _items(tiny_item), TrainingConfig(lr=0.0, weight_decay=0.0, epochs=2, batch_size=2))
    assert all(torch.equal(before[n], p) for n, p in model.named_parameters())


def test_same_seed_same_history(tiny_config, tiny_item):
    cfg = TrainingConfig(epochs=2, batch_size=2)
    a = train(DynGhost(tiny_config), _items(tiny_item), cfg, rng=rng_substream(7, 5)).history
    b = train(DynGhost(tiny_config), _items(tiny_item), cfg, rng=rng_substream(7, 5)).history
    assert a == b and len(a) == 4


def test_max_steps(tiny_config, tiny_item):
    result = train(DynGhost(tiny_config), _items(tiny_item), TrainingConfig(epochs=10, batch_size=1, max_steps=4))
    assert len(result.history) == 4
    assert result.state.step == 4


def test_empty_dataset(tiny_config):
    with pytest.raises(DomainError):
        train(DynGhost(tiny_config), [])


def test_checkpoint_round_trip(tmp_path, tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    result = train(DynGhost(tiny_config), _items(tiny_item, 1), TrainingConfig(epochs=1))
    save_checkpoint(result.model, result.state, tmp_path / "ckpt", extra={"normalizer": None})
    model, manifest = load_checkpoint(tmp_path / "ckpt")
    assert manifest["step"] == 1 and "normalizer" in manifest
    # float32 storage
    assert np.allclose(predict(model, patterns, buckets), predict(result.model, patterns, buckets), atol=1e-5)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(ConfigError):
        load_checkpoint(tmp_path)


def test_ablation_variants(tiny_config):
    assert len(ABLATION_VARIANTS) == 6
    cfg, weights = ablation_variant("no-temporal-attention", tiny_config)
    assert cfg.temporal_blocks == 0 and weights == (1.0, 0.5, 0.1)
    assert ablation_variant("mse-only-loss", tiny_config)[1] == (1.0, 0.0, 0.0)
    assert ablation_variant("no-temp-consistency-loss", tiny_config)[1] == (1.0, 0.5, 0.0)
    assert ablation_variant("no-temporal-pos-enc", tiny_config)[0].temporal_pos_enc is False
    assert ablation_variant("1-temporal-block", tiny_config)[0].temporal_blocks == 1
    with pytest.raises(ConfigError):
        ablation_variant("no-heads", tiny_config)


@pytest.mark.slow
def test_overfits_a_single_sequence(tiny_config, tiny_item):
    patterns, buckets, truth = tiny_item
    result = train(
        DynGhost(tiny_config),
        _items(tiny_item, 1),
        TrainingConfig(epochs=2000, batch_size=1, lr=1e-2, weight_decay=0.0),
    )
    assert result.history[-1] <= result.history[0] / 10
    pred = predict(result.model, patterns, buckets)
    assert float(loss_total(torch.as_tensor(pred), truth).mse) < 0.01
    assert ssim(pred[0], truth[0]) > 0.95


def test_zero_epochs_takes_no_steps(tiny_config, tiny_item):
    model = DynGhost(tiny_config)
    before = {n: p.detach().clone() for n, p in model.named_parameters()}
    result = train(model, _items(tiny_item), TrainingConfig(epochs=3, batch_size=2), epochs=0)
    assert result.history == [] and result.state.step == 0
    assert all(torch.equal(before[n], p) for n, p in model.named_parameters())


def test_negative_epochs(tiny_config, tiny_item):
    with pytest.raises(DomainError):
        train(DynGhost(tiny_config), _items(tiny_item), epochs=-1)


@pytest.mark.slow
def test_overfits_a_benchmark_sized_sequence(toy_model_config, toy_item):
    patterns, buckets, truth = toy_item
    result = train(
        DynGhost(toy_model_config),
        _items(toy_item, 1),
        TrainingConfig(epochs=2000, batch_size=1, lr=1e-2, weight_decay=0.0, max_steps=2000),
    )
    assert len(result.history) <= 2000
    assert min(result.history) <= result.history[0] / 10
    pred = predict(result.model, patterns, buckets)
    assert np.mean([ssim(pred[t], truth[t]) for t in range(truth.shape[0])]) > 0.95
