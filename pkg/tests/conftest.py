import numpy as np
import pytest

from src.core.rng import rng_substream
from src.experiments.config import load_config
from src.simulation.patterns import PatternSet


@pytest.fixture
def rng():
    return rng_substream(7, 0)


@pytest.fixture
def toy_patterns(rng) -> PatternSet:
    """24 Bernoulli patterns on 16x16, the toy sampling ratio."""
    from src.simulation.patterns import generate_bernoulli

    return generate_bernoulli(24, 16, 16, 0.5, rng)


@pytest.fixture
def delta_patterns() -> PatternSet:
    """One indicator pattern per pixel of an 11x11 frame."""
    eye = np.eye(121).reshape(121, 11, 11)
    return PatternSet(patterns=eye, kind="delta")


@pytest.fixture
def toy_config(tmp_path):
    """Small, fast experiment config writing under a temporary directory."""
    return load_config(
        seed=7,
        out=tmp_path / "results",
        overrides={
            "scene": {"H": 12, "W": 12, "T": 3, "sequences": 2, "train_sequences": 2, "sprite_size": 3},
            "patterns": {"kind": "bernoulli", "M": 16},
            "reconstructors": {"fista": {"iterations": 20}, "record_timing": False},
            "model": {"embed_dim": 8, "head_count": 2, "spatial_blocks": 1, "temporal_blocks": 1,
                      "mlp_hidden": 8, "head_hidden": 16},
            "training": {"epochs": 1, "batch_size": 2},
            "normalization": {"variance_draws": 2000},
            "sweeps": {"snr_db": [30.0, 10.0], "gradcheck_probes": 20},
        },
    )


@pytest.fixture
def benchmark_config(tmp_path):
    """The default toy benchmark: 16x16 frames, T=4, 24 speckle patterns (beta ~ 0.09)."""
    return load_config(seed=7, out=tmp_path / "benchmark")
