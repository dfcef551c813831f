"""
DynGhost configuration and the ablation variants built from it.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.utils.errors import ConfigError

BlockKind = Literal["spatial", "temporal"]

LOSS_WEIGHTS: tuple[float, float, float] = (1.0, 0.5, 0.1)

ABLATION_VARIANTS: tuple[str, ...] = (
    "full",
    "no-temporal-attention",
    "no-temporal-pos-enc",
    "mse-only-loss",
    "no-temp-consistency-loss",
    "1-temporal-block",
)


class DynGhostConfig(BaseModel):
    """
    Toy defaults: T=4, M=24, 16x16 frames, D=16, 2 heads, blocks S,T,S,T.

    ``max_frames`` sizes the temporal positional table; sequences of any
    length up to it can be fed to the same model.
    """

    model_config = ConfigDict(extra="forbid")

    T: int = Field(4, ge=1)
    M: int = Field(24, ge=1)
    H: int = Field(16, ge=1)
    W: int = Field(16, ge=1)
    embed_dim: int = Field(16, ge=2)
    head_count: int = Field(2, ge=1)
    spatial_blocks: int = Field(2, ge=0)
    temporal_blocks: int = Field(2, ge=0)
    block_order: list[BlockKind] | None = None
    mlp_hidden: int = Field(32, ge=1)
    head_hidden: int = Field(64, ge=1)
    max_frames: int | None = Field(None, ge=1)
    temporal_pos_enc: bool = True
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.embed_dim % self.head_count != 0:
            raise ValueError(f"embed_dim {self.embed_dim} is not divisible by head_count {self.head_count}")
        if self.max_frames is not None and self.max_frames < self.T:
            raise ValueError(f"max_frames {self.max_frames} is smaller than T {self.T}")
        if self.block_order is not None:
            if self.block_order.count("spatial") != self.spatial_blocks or \
                    self.block_order.count("temporal") != self.temporal_blocks:
                raise ValueError("block_order does not match spatial_blocks / temporal_blocks")
        return self

    @property
    def frame_capacity(self) -> int:
        return self.max_frames or self.T

    def layout(self) -> list[str]:
        """Block order; interleaved S,T,S,T... by default, leftovers appended."""
        if self.block_order is not None:
            return list(self.block_order)
        order = []
        s, t = self.spatial_blocks, self.temporal_blocks
        while s or t:
            if s:
                order.append("spatial")
                s -= 1
            if t:
                order.append("temporal")
                t -= 1
        return order


def ablation_variant(
    name: str,
    base: DynGhostConfig,
    weights: tuple[float, float, float] = LOSS_WEIGHTS,
) -> tuple[DynGhostConfig, tuple[float, float, float]]:
    """Model config and loss weights for one ablation row."""
    if name not in ABLATION_VARIANTS:
        raise ConfigError(f"Unknown ablation variant '{name}'. Available: {', '.join(ABLATION_VARIANTS)}")
    update: dict = {"block_order": None}
    if name == "no-temporal-attention":
        update["temporal_blocks"] = 0
    elif name == "no-temporal-pos-enc":
        update["temporal_pos_enc"] = False
    elif name == "1-temporal-block":
        update["temporal_blocks"] = 1
    elif name == "mse-only-loss":
        weights = (weights[0], 0.0, 0.0)
    elif name == "no-temp-consistency-loss":
        weights = (weights[0], weights[1], 0.0)
    config = DynGhostConfig(**{**base.model_dump(), **update})
    return config, weights
