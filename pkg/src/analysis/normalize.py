"""
Photon-count normalizations.

    none            n
    sqrt            sqrt(n)
    log1p           ln(1 + n)
    minmax          (n - min) / (max - min)      fitted, then frozen
    zscore          (n - mean) / std             fitted, then frozen
    anscombe        2 sqrt(n + 3/8)
    freeman_tukey   sqrt(n) + sqrt(n + 1)

Inverses are algebraic. The Anscombe inverse is the biased (z/2)^2 - 3/8;
any inverse that lands below 0 is clamped to 0 and flagged.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from sklearn.preprocessing import MinMaxScaler, StandardScaler

from src.utils.errors import DegenerateFitError, DomainError
from src.utils.logger import get_logger

NormalizerKind = Literal["none", "sqrt", "log1p", "minmax", "zscore", "anscombe", "freeman_tukey"]
NORMALIZER_KINDS: tuple[str, ...] = ("none", "sqrt", "log1p", "minmax", "zscore", "anscombe", "freeman_tukey")
ROUNDING_SLACK = 1e-9

logger = get_logger("Normalizer")


class Normalizer(BaseModel):
    """Frozen normalization; serialises as ``{"kind": ..., "stats": {...}}``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: NormalizerKind
    stats: dict[str, float] = Field(default_factory=dict)

    @classmethod
    def fit(cls, kind: str, counts) -> "Normalizer":
        return fit(kind, counts)

    def apply(self, n):
        return apply(self, n)

    def invert(self, z):
        return invert(self, z)


def fit(kind: str, counts) -> Normalizer:
    if kind not in NORMALIZER_KINDS:
        raise DomainError(f"Unknown normalizer '{kind}'. Available: {', '.join(NORMALIZER_KINDS)}")
    data = np.asarray(counts, dtype=np.float64).reshape(-1, 1)
    if data.size == 0:
        raise DomainError("cannot fit a normalizer on empty counts")
    if np.any(data < 0) or not np.all(np.isfinite(data)):
        raise DomainError("counts must be finite and non-negative")

    if kind == "minmax":
        scaler = MinMaxScaler().fit(data)
        lo, hi = float(scaler.data_min_[0]), float(scaler.data_max_[0])
        if hi == lo:
            raise DegenerateFitError(f"minmax fit needs min < max, got constant {lo}")
        return Normalizer(kind=kind, stats={"min": lo, "max": hi})
    if kind == "zscore":
        scaler = StandardScaler().fit(data)
        if float(scaler.var_[0]) == 0.0:
            raise DegenerateFitError("zscore fit on zero-variance counts")
        return Normalizer(kind=kind, stats={"mean": float(scaler.mean_[0]), "std": float(scaler.scale_[0])})
    return Normalizer(kind=kind)


def apply(nz: Normalizer, n):
    """Forward transform of a count or an array of counts."""
    values = np.asarray(n, dtype=np.float64)
    if np.any(values < 0):
        raise DomainError("normalizer input must be >= 0")

    kind = nz.kind
    if kind == "none":
        out = values.copy()
    elif kind == "sqrt":
        out = np.sqrt(values)
    elif kind == "log1p":
        out = np.log1p(values)
    elif kind == "minmax":
        out = (values - nz.stats["min"]) / (nz.stats["max"] - nz.stats["min"])
    elif kind == "zscore":
        out = (values - nz.stats["mean"]) / nz.stats["std"]
    elif kind == "anscombe":
        out = 2.0 * np.sqrt(values + 0.375)
    else:
        out = np.sqrt(values) + np.sqrt(values + 1.0)
    return float(out) if out.ndim == 0 else out


def invert(nz: Normalizer, z):
    """
    Inverse transform. Returns ``(value, flagged)``; ``flagged`` marks entries
    that fell below 0 and were clamped.
    """
    values = np.asarray(z, dtype=np.float64)
    kind = nz.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "none":
            out = values.copy()
        elif kind == "sqrt":
            out = np.where(values >= 0, np.square(values), -1.0)
        elif kind == "log1p":
            out = np.expm1(values)
        elif kind == "minmax":
            out = values * (nz.stats["max"] - nz.stats["min"]) + nz.stats["min"]
        elif kind == "zscore":
            out = values * nz.stats["std"] + nz.stats["mean"]
        elif kind == "anscombe":
            out = np.where(values >= 0, np.square(values / 2.0) - 0.375, -1.0)
        else:
            # freeman_tukey(0) = 1 is the smallest image value
            root = (np.square(values) - 1.0) / (2.0 * values)
            out = np.where(values >= 1.0, np.square(root), -1.0)

    # rounding residue around 0 is clamped but not flagged
    flagged = out < -ROUNDING_SLACK
    out = np.where(out < 0, 0.0, out)
    if np.any(flagged):
        logger.warning(f"{kind} inverse clamped {int(np.sum(flagged))} value(s) to 0")
    if out.ndim == 0:
        return float(out), bool(flagged)
    return out, flagged
