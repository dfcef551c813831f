"""
Tensor container, GTF IO and deterministic random streams.
"""

from src.core.rng import (
    RngStream,
    derive_stream_id,
    rng_substream,
    sample_binomial,
    sample_gaussian,
    sample_gaussian_array,
    sample_poisson,
    sample_poisson_array,
)
from src.core.tensor import TensorF, load_array, load_tensor, save_array, save_tensor

__all__ = [
    "RngStream",
    "TensorF",
    "derive_stream_id",
    "load_array",
    "load_tensor",
    "rng_substream",
    "sample_binomial",
    "sample_gaussian",
    "sample_gaussian_array",
    "sample_poisson",
    "sample_poisson_array",
    "save_array",
    "save_tensor",
]
