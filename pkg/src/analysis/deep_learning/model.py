"""
Toy DynGhost: spatio-temporal transformer mapping a bucket sequence to frames.

Tokens: z[t, i] = [Embed(H_i) || b[t, i]] + PE_spatial[i] + PE_temporal[t]
(Embed has D-1 outputs, the bucket scalar is channel D-1).
Spatial blocks attend over patterns within a frame, temporal blocks over
frames at a fixed pattern. Head per frame: flatten M x D, 2-layer MLP to
H*W, sigmoid.

Everything runs in float64.
"""

import math

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from src.analysis.deep_learning.config import DynGhostConfig
from src.simulation.patterns import PatternSet
from src.utils.errors import ShapeError

DTYPE = torch.float64


def as_tensor(x) -> torch.Tensor:
    if isinstance(x, PatternSet):
        x = x.patterns
    if isinstance(x, torch.Tensor):
        return x.to(DTYPE)
    return torch.as_tensor(np.asarray(x, dtype=np.float64), dtype=DTYPE)


class AttentionBlock(nn.Module):
    """Pre-norm encoder block: x + MHSA(LN(x)), then x + MLP(LN(x))."""

    def __init__(self, dim: int, heads: int, hidden: int, mode: str):
        super().__init__()
        if mode not in ("spatial", "temporal"):
            raise ShapeError(f"attention mode must be 'spatial' or 'temporal', got '{mode}'")
        self.mode = mode
        self.heads = heads
        self.norm1 = nn.LayerNorm(dim, dtype=DTYPE)
        self.qkv = nn.Linear(dim, 3 * dim, dtype=DTYPE)
        self.proj = nn.Linear(dim, dim, dtype=DTYPE)
        self.norm2 = nn.LayerNorm(dim, dtype=DTYPE)
        self.fc1 = nn.Linear(dim, hidden, dtype=DTYPE)
        self.fc2 = nn.Linear(hidden, dim, dtype=DTYPE)

    def attend(self, x: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Self-attention over axis 1 of ``x`` [B, L, D]; also returns the weights [B, heads, L, L]."""
        B, L, D = x.shape
        dh = D // self.heads
        qkv = self.qkv(x).reshape(B, L, 3, self.heads, dh).permute(2, 0, 3, 1, 4)
        q, k, v = qkv[0], qkv[1], qkv[2]
        weights = torch.softmax(q @ k.transpose(-2, -1) / math.sqrt(dh), dim=-1)
        out = (weights @ v).transpose(1, 2).reshape(B, L, D)
        return self.proj(out), weights

    def forward(self, tokens: torch.Tensor, return_weights: bool = False):
        """``tokens`` is [..., T, M, D]."""
        *lead, T, M, D = tokens.shape
        if self.mode == "spatial":
            x = tokens.reshape(-1, M, D)
        else:
            x = tokens.transpose(-3, -2).reshape(-1, T, D)

        attended, weights = self.attend(self.norm1(x))
        x = x + attended
        x = x + self.fc2(F.gelu(self.fc1(self.norm2(x))))

        if self.mode == "spatial":
            out = x.reshape(*lead, T, M, D)
        else:
            out = x.reshape(*lead, M, T, D).transpose(-3, -2)
        return (out, weights) if return_weights else out


class DynGhost(nn.Module):
    def __init__(self, config: DynGhostConfig):
        super().__init__()
        self.config = config
        D = config.embed_dim
        self.embed = nn.Linear(config.H * config.W, D - 1, dtype=DTYPE)
        self.pe_spatial = nn.Parameter(torch.zeros(config.M, D, dtype=DTYPE))
        self.pe_temporal = nn.Parameter(torch.zeros(config.frame_capacity, D, dtype=DTYPE))
        self.blocks = nn.ModuleList(
            AttentionBlock(D, config.head_count, config.mlp_hidden, mode) for mode in config.layout()
        )
        self.head1 = nn.Linear(config.M * D, config.head_hidden, dtype=DTYPE)
        self.head2 = nn.Linear(config.head_hidden, config.H * config.W, dtype=DTYPE)
        self.reset_parameters()

    def reset_parameters(self) -> None:
        """Deterministic init from ``config.seed``: N(0, 1/fan_in) matrices, N(0, 0.02^2) tables, zero biases."""
        g = torch.Generator().manual_seed(self.config.seed)
        with torch.no_grad():
            for name, p in self.named_parameters():
                if name.startswith("pe_"):
                    p.copy_(0.02 * torch.randn(p.shape, generator=g, dtype=DTYPE))
                elif "norm" in name:
                    p.fill_(1.0 if name.endswith("weight") else 0.0)
                elif name.endswith("weight"):
                    p.copy_(torch.randn(p.shape, generator=g, dtype=DTYPE) / math.sqrt(p.shape[1]))
                else:
                    p.zero_()

    def embed_tokens(self, patterns, buckets) -> torch.Tensor:
        patterns = as_tensor(patterns)
        buckets = as_tensor(buckets)
        cfg = self.config
        if patterns.shape != (cfg.M, cfg.H, cfg.W):
            raise ShapeError(f"patterns are {tuple(patterns.shape)}, model expects {(cfg.M, cfg.H, cfg.W)}")
        if buckets.shape[-1] != cfg.M or buckets.ndim not in (2, 3):
            raise ShapeError(f"buckets must be [T, M] or [B, T, M] with M={cfg.M}, got {tuple(buckets.shape)}")
        T = buckets.shape[-2]
        if T > cfg.frame_capacity:
            raise ShapeError(f"{T} frames exceed the temporal table of {cfg.frame_capacity}")

        pattern_features = self.embed(patterns.reshape(cfg.M, -1))
        pattern_features = pattern_features.expand(*buckets.shape, cfg.embed_dim - 1)
        tokens = torch.cat([pattern_features, buckets.unsqueeze(-1)], dim=-1)
        tokens = tokens + self.pe_spatial
        if cfg.temporal_pos_enc:
            tokens = tokens + self.pe_temporal[:T].unsqueeze(1)
        return tokens

    def head(self, tokens: torch.Tensor) -> torch.Tensor:
        cfg = self.config
        flat = tokens.reshape(*tokens.shape[:-2], cfg.M * cfg.embed_dim)
        logits = self.head2(F.gelu(self.head1(flat)))
        return torch.sigmoid(logits).reshape(*tokens.shape[:-2], cfg.H, cfg.W)

    def forward(self, patterns, buckets) -> torch.Tensor:
        tokens = self.embed_tokens(patterns, buckets)
        for block in self.blocks:
            tokens = block(tokens)
        return self.head(tokens)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())


def embed_tokens(model: DynGhost, patterns, buckets) -> torch.Tensor:
    return model.embed_tokens(patterns, buckets)


def attention_block(tokens: torch.Tensor, mode: str, block: AttentionBlock) -> torch.Tensor:
    if block.mode != mode:
        raise ShapeError(f"block is {block.mode}, asked for {mode}")
    return block(tokens)


def forward(model: DynGhost, patterns, buckets) -> torch.Tensor:
    return model(patterns, buckets)


def predict(model: DynGhost, patterns, buckets) -> np.ndarray:
    """Inference helper returning a numpy [T, H, W] array."""
    with torch.no_grad():
        return model(patterns, buckets).numpy()
