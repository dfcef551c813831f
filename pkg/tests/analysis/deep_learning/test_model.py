import numpy as np
import pytest
import torch

from src.analysis.deep_learning import (
    AttentionBlock,
    DynGhost,
    DynGhostConfig,
    attention_block,
    embed_tokens,
    forward,
    predict,
)
from src.analysis.deep_learning.model import DTYPE
from src.utils.errors import ShapeError


def test_config_validation():
    with pytest.raises(ValueError):
        DynGhostConfig(embed_dim=10, head_count=3)
    with pytest.raises(ValueError):
        DynGhostConfig(T=8, max_frames=4)
    with pytest.raises(ValueError):
        DynGhostConfig(spatial_blocks=1, temporal_blocks=1, block_order=["spatial", "spatial"])


def test_default_layout_interleaves():
    assert DynGhostConfig().layout() == ["spatial", "temporal", "spatial", "temporal"]
    assert DynGhostConfig(spatial_blocks=2, temporal_blocks=0).layout() == ["spatial", "spatial"]


def test_embed_shape(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    tokens = embed_tokens(DynGhost(tiny_config), patterns, buckets)
    assert tokens.shape == (3, 8, 8)


def test_zero_parameters_and_buckets_give_zero_tokens(tiny_config, zero_patterns):
    model = DynGhost(tiny_config)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    tokens = model.embed_tokens(zero_patterns, np.zeros((3, 8)))
    assert not tokens.any()


def test_bucket_change_is_local(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config)
    changed = buckets.copy()
    changed[1, 4] += 0.3
    diff = (model.embed_tokens(patterns, changed) - model.embed_tokens(patterns, buckets)).detach()
    assert float(diff[1, 4, -1]) == pytest.approx(0.3)
    diff[1, 4, -1] = 0.0
    assert not diff.any()


def test_embed_rejects_bad_shapes(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config)
    with pytest.raises(ShapeError):
        model.embed_tokens(patterns[:4], buckets)
    with pytest.raises(ShapeError):
        model.embed_tokens(patterns, np.zeros((5, 8)))


def test_attention_rows_sum_to_one():
    block = AttentionBlock(8, 2, 16, "spatial")
    tokens = torch.randn(3, 5, 8, dtype=DTYPE, generator=torch.Generator().manual_seed(0))
    _, weights = block(tokens, return_weights=True)
    assert torch.allclose(weights.sum(-1), torch.ones_like(weights.sum(-1)), atol=1e-9)


def test_spatial_block_keeps_frames_independent():
    block = AttentionBlock(8, 2, 16, "spatial")
    tokens = torch.randn(4, 5, 8, dtype=DTYPE, generator=torch.Generator().manual_seed(1))
    perm = torch.tensor([2, 0, 3, 1])
    with torch.no_grad():
        assert torch.allclose(block(tokens[perm]), block(tokens)[perm], atol=1e-12)


def test_temporal_block_keeps_patterns_independent():
    block = AttentionBlock(8, 2, 16, "temporal")
    tokens = torch.randn(4, 5, 8, dtype=DTYPE, generator=torch.Generator().manual_seed(2))
    perm = torch.tensor([4, 2, 0, 1, 3])
    with torch.no_grad():
        assert torch.allclose(block(tokens[:, perm]), block(tokens)[:, perm], atol=1e-12)


def test_attention_block_checks_mode():
    block = AttentionBlock(8, 2, 16, "temporal")
    with pytest.raises(ShapeError):
        attention_block(torch.zeros(2, 3, 8, dtype=DTYPE), "spatial", block)
    with pytest.raises(ShapeError):
        AttentionBlock(8, 2, 16, "diagonal")


def test_outputs_in_open_unit_interval(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    out = predict(DynGhost(tiny_config), patterns, buckets)
    assert out.shape == (3, 11, 11)
    assert out.min() > 0.0 and out.max() < 1.0


def test_no_blocks_is_embed_then_head(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config.model_copy(update={"spatial_blocks": 0, "temporal_blocks": 0}))
    assert len(model.blocks) == 0
    with torch.no_grad():
        staged = model.head(model.embed_tokens(patterns, buckets))
        assert torch.allclose(forward(model, patterns, buckets), staged, atol=1e-12)


def test_same_seed_same_output(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    a = predict(DynGhost(tiny_config), patterns, buckets)
    b = predict(DynGhost(tiny_config), patterns, buckets)
    assert np.array_equal(a, b)


def test_batched_forward_matches_single(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config)
    single = predict(model, patterns, buckets)
    batch = predict(model, patterns, np.stack([buckets, buckets]))
    assert np.allclose(batch[1], single, atol=1e-12)


def test_shorter_sequences_fit_the_temporal_table(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config.model_copy(update={"max_frames": 6}))
    assert predict(model, patterns, buckets[:2]).shape == (2, 11, 11)
    with pytest.raises(ShapeError):
        predict(model, patterns, np.zeros((7, 8)))


def test_without_temporal_blocks_frames_are_independent(tiny_config, tiny_item):
    patterns, buckets, _ = tiny_item
    model = DynGhost(tiny_config.model_copy(update={"temporal_blocks": 0}))
    base = predict(model, patterns, buckets)
    for t_changed in range(3):
        changed = buckets.copy()
        changed[t_changed] += np.linspace(0.05, 0.4, buckets.shape[1])
        out = predict(model, patterns, changed)
        for t in range(3):
            if t != t_changed:
                assert np.array_equal(out[t], base[t])
        assert not np.array_equal(out[t_changed], base[t_changed])
