"""
Functional AdamW with decoupled weight decay:

    m <- b1 m + (1 - b1) g
    v <- b2 v + (1 - b2) g^2
    theta <- theta (1 - lr wd) - lr m_hat / (sqrt(v_hat) + eps)

The decay term uses the pre-update theta, as in torch.optim.AdamW.
"""

import math
from dataclasses import dataclass, field

import torch

from src.utils.errors import ShapeError


@dataclass
class AdamWState:
    lr: float = 3e-4
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    weight_decay: float = 1e-3
    step: int = 0
    m: dict[str, torch.Tensor] = field(default_factory=dict)
    v: dict[str, torch.Tensor] = field(default_factory=dict)

    def hyperparameters(self) -> dict:
        return {"lr": self.lr, "betas": list(self.betas), "eps": self.eps, "weight_decay": self.weight_decay}


def adamw_step(params: dict[str, torch.Tensor], grads: dict[str, torch.Tensor], state: AdamWState) -> AdamWState:
    """Update ``params`` in place and advance ``state``."""
    missing = set(params) ^ set(grads)
    if missing:
        raise ShapeError(f"parameters and gradients differ in names: {sorted(missing)}")
    b1, b2 = state.betas
    state.step += 1
    bias1 = 1.0 - b1 ** state.step
    bias2 = 1.0 - b2 ** state.step

    with torch.no_grad():
        for name, theta in params.items():
            g = grads[name]
            if g.shape != theta.shape:
                raise ShapeError(f"gradient for '{name}' is {tuple(g.shape)}, parameter is {tuple(theta.shape)}")
            m = state.m.setdefault(name, torch.zeros_like(theta))
            v = state.v.setdefault(name, torch.zeros_like(theta))
            m.mul_(b1).add_(g, alpha=1.0 - b1)
            v.mul_(b2).addcmul_(g, g, value=1.0 - b2)

            theta.mul_(1.0 - state.lr * state.weight_decay)
            denom = (v.sqrt() / math.sqrt(bias2)).add_(state.eps)
            theta.addcdiv_(m, denom, value=-state.lr / bias1)
    return state
