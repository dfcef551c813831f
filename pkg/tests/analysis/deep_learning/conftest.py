import numpy as np
import pytest

from src.analysis.deep_learning import DynGhostConfig
from src.core.rng import rng_substream
from src.simulation.measurement import ideal_intensity
from src.simulation.patterns import generate_bernoulli
from src.simulation.scene import random_scene


@pytest.fixture
def tiny_config() -> DynGhostConfig:
    return DynGhostConfig(T=3, M=8, H=11, W=11, embed_dim=8, head_count=2, spatial_blocks=1, temporal_blocks=1,
                          mlp_hidden=8, head_hidden=16, seed=3)


@pytest.fixture
def tiny_item(tiny_config):
    """(patterns, buckets, truth) for one sequence matching ``tiny_config``."""
    ps = generate_bernoulli(tiny_config.M, tiny_config.H, tiny_config.W, 0.5, rng_substream(7, 0))
    scene = random_scene(7, 0, tiny_config.T, (tiny_config.H, tiny_config.W), "disc", 3, "linear", 1.0)
    return ps.patterns, ideal_intensity(ps, scene), scene.frames


@pytest.fixture
def zero_patterns(tiny_config):
    return np.zeros((tiny_config.M, tiny_config.H, tiny_config.W))


@pytest.fixture
def toy_model_config() -> DynGhostConfig:
    """The default benchmark geometry: 4 frames of 16x16, 24 patterns, D=16."""
    return DynGhostConfig(T=4, M=24, H=16, W=16, embed_dim=16, head_count=2, spatial_blocks=2, temporal_blocks=2,
                          mlp_hidden=32, head_hidden=64, seed=7)


@pytest.fixture
def toy_item(toy_model_config):
    cfg = toy_model_config
    ps = generate_bernoulli(cfg.M, cfg.H, cfg.W, 0.5, rng_substream(7, 0))
    scene = random_scene(7, 0, cfg.T, (cfg.H, cfg.W), "disc", 4, "linear", 1.0)
    return ps.patterns, ideal_intensity(ps, scene), scene.frames
