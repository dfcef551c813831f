"""
Reverse-mode gradients of the DynGhost loss and a central-difference check.

The check perturbs randomly chosen scalar parameter entries by +-h in
float64 and compares (L(+h) - L(-h)) / 2h with the autograd gradient using
|g_a - g_fd| / max(|g_a|, |g_fd|, 1e-8).
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import torch
import torch.nn as nn

from src.analysis.deep_learning.config import LOSS_WEIGHTS
from src.analysis.deep_learning.loss import loss_total
from src.core.rng import RngStream, derive_stream_id, rng_substream
from src.utils.errors import DomainError, NumericError

GRADCHECK_THRESHOLD = 1e-4
_FLOOR = 1e-8

LossFn = Callable[[nn.Module], torch.Tensor]


def dynghost_loss_fn(patterns, buckets, truth, weights=LOSS_WEIGHTS) -> LossFn:
    """Closure computing the scalar training loss of ``model`` on one item or batch."""
    def _loss(model: nn.Module) -> torch.Tensor:
        return loss_total(model(patterns, buckets), truth, weights).total
    return _loss


def gradients(model: nn.Module, loss_fn: LossFn, scale: float = 1.0) -> dict[str, torch.Tensor]:
    """Gradient of ``scale * loss_fn(model)`` for every named parameter; unused ones get zeros."""
    named = list(model.named_parameters())
    loss = scale * loss_fn(model)
    if not torch.isfinite(loss):
        raise NumericError("loss is not finite", parameter="loss")
    grads = torch.autograd.grad(loss, [p for _, p in named], allow_unused=True)
    store = {}
    for (name, p), g in zip(named, grads):
        g = torch.zeros_like(p) if g is None else g.detach()
        if not torch.all(torch.isfinite(g)):
            raise NumericError("non-finite gradient", parameter=name)
        store[name] = g
    return store


def backward(model: nn.Module, patterns, buckets, truth, weights=LOSS_WEIGHTS, scale: float = 1.0) -> dict[str, torch.Tensor]:
    return gradients(model, dynghost_loss_fn(patterns, buckets, truth, weights), scale)


@dataclass
class GradientCheckReport:
    h: float
    probes: list[dict] = field(default_factory=list)

    @property
    def max_relative_error(self) -> float:
        return max((p["relative_error"] for p in self.probes), default=0.0)

    @property
    def mean_relative_error(self) -> float:
        return sum(p["relative_error"] for p in self.probes) / len(self.probes) if self.probes else 0.0

    def passed(self, threshold: float = GRADCHECK_THRESHOLD) -> bool:
        return self.max_relative_error < threshold

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "probe_count": len(self.probes),
            "max_relative_error": self.max_relative_error,
            "mean_relative_error": self.mean_relative_error,
            "threshold": GRADCHECK_THRESHOLD,
            "passed": self.passed(),
            "probes": self.probes,
        }


def choose_probes(model: nn.Module, probe_count: int, rng: RngStream) -> list[tuple[str, int]]:
    """Uniform over scalar entries of all parameters."""
    named = [(name, p.numel()) for name, p in model.named_parameters()]
    total = sum(n for _, n in named)
    probes = []
    for _ in range(probe_count):
        k = min(total - 1, int(rng.uniform() * total))
        for name, n in named:
            if k < n:
                probes.append((name, k))
                break
            k -= n
    return probes


def gradient_check(
    model: nn.Module,
    loss_fn: LossFn,
    probe_count: int = 200,
    h: float = 1e-5,
    rng: RngStream | None = None,
) -> GradientCheckReport:
    if not 1e-6 <= h <= 1e-4:
        raise DomainError(f"finite-difference step must be in [1e-6, 1e-4], got {h}")
    params = dict(model.named_parameters())
    if any(p.dtype != torch.float64 for p in params.values()):
        raise DomainError("gradient check requires float64 parameters")
    rng = rng or rng_substream(0, derive_stream_id("gradcheck"))

    analytic = gradients(model, loss_fn)
    report = GradientCheckReport(h=h)
    with torch.no_grad():
        for name, index in choose_probes(model, probe_count, rng):
            flat = params[name].view(-1)
            original = flat[index].item()
            flat[index] = original + h
            plus = loss_fn(model).item()
            flat[index] = original - h
            minus = loss_fn(model).item()
            flat[index] = original

            g_fd = (plus - minus) / (2.0 * h)
            g_a = analytic[name].view(-1)[index].item()
            if not (math.isfinite(g_fd) and math.isfinite(g_a)):
                raise NumericError("non-finite value during gradient check", parameter=name)
            error = abs(g_a - g_fd) / max(abs(g_a), abs(g_fd), _FLOOR)
            report.probes.append({"parameter": name, "index": index, "analytic": g_a, "numeric": g_fd, "relative_error": error})
    return report
