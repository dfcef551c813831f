"""
Mini-batch training loop for DynGhost and GTF checkpoints.

Batches are whole sequences. Each epoch shuffles item order with a
Fisher-Yates pass driven by the supplied stream: for i = n-1 .. 1,
j = min(i, floor(u * (i + 1))) and items i, j swap.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field

from src.analysis.deep_learning.config import LOSS_WEIGHTS, DynGhostConfig
from src.analysis.deep_learning.gradients import dynghost_loss_fn, gradients
from src.analysis.deep_learning.model import DynGhost, as_tensor
from src.analysis.deep_learning.optim import AdamWState, adamw_step
from src.core.rng import RngStream, derive_stream_id, rng_substream
from src.core.tensor import load_array, save_array
from src.utils.errors import ConfigError, DomainError
from src.utils.io import read_json, write_json
from src.utils.logger import get_logger, progress

logger = get_logger("DynGhostTrainer")


class TrainingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(20, ge=1)
    batch_size: int = Field(4, ge=1)
    lr: float = Field(3e-4, ge=0.0)
    weight_decay: float = Field(1e-3, ge=0.0)
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = Field(1e-8, gt=0.0)
    loss_weights: tuple[float, float, float] = LOSS_WEIGHTS
    max_steps: int | None = Field(None, ge=1)

    def optimizer_state(self) -> AdamWState:
        return AdamWState(lr=self.lr, betas=self.betas, eps=self.eps, weight_decay=self.weight_decay)


@dataclass
class TrainingItem:
    """One sequence: patterns [M, H, W], normalised buckets [T, M], truth [T, H, W]."""

    patterns: np.ndarray
    buckets: np.ndarray
    truth: np.ndarray


@dataclass
class TrainResult:
    model: DynGhost
    state: AdamWState
    history: list[float] = field(default_factory=list)


def shuffle_order(n: int, rng: RngStream) -> list[int]:
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = min(i, int(rng.uniform() * (i + 1)))
        order[i], order[j] = order[j], order[i]
    return order


def _batch_loss_fn(batch: list[TrainingItem], weights):
    first = batch[0].patterns
    if all(item.patterns is first or np.array_equal(item.patterns, first) for item in batch) and \
            len({item.buckets.shape for item in batch}) == 1:
        buckets = np.stack([item.buckets for item in batch])
        truth = np.stack([item.truth for item in batch])
        return dynghost_loss_fn(as_tensor(first), as_tensor(buckets), as_tensor(truth), weights)

    fns = [dynghost_loss_fn(as_tensor(i.patterns), as_tensor(i.buckets), as_tensor(i.truth), weights) for i in batch]
    return lambda model: sum(fn(model) for fn in fns) / len(fns)


def train(
    model: DynGhost,
    dataset: list[TrainingItem],
    cfg: TrainingConfig | None = None,
    epochs: int | None = None,
    rng: RngStream | None = None,
    checkpoint_dir: str | Path | None = None,
) -> TrainResult:
    if not dataset:
        raise DomainError("training dataset is empty")
    cfg = cfg or TrainingConfig()
    epochs = cfg.epochs if epochs is None else epochs
    if epochs < 0:
        raise DomainError(f"epochs must be >= 0, got {epochs}")
    rng = rng or rng_substream(model.config.seed, derive_stream_id("shuffle"))
    state = cfg.optimizer_state()
    params = dict(model.named_parameters())
    history: list[float] = []

    steps_per_epoch = -(-len(dataset) // cfg.batch_size)
    total = epochs * steps_per_epoch if cfg.max_steps is None else min(cfg.max_steps, epochs * steps_per_epoch)
    bar = progress(range(total), desc="train", total=total)
    bar_iter = iter(bar)

    model.train()
    done = False
    for epoch in range(epochs):
        order = shuffle_order(len(dataset), rng)
        for start in range(0, len(order), cfg.batch_size):
            batch = [dataset[k] for k in order[start:start + cfg.batch_size]]
            loss_fn = _batch_loss_fn(batch, cfg.loss_weights)
            loss_holder = {}

            def _tracked(m, fn=loss_fn):
                value = fn(m)
                loss_holder["value"] = float(value.detach())
                return value

            grads = gradients(model, _tracked)
            adamw_step(params, grads, state)
            history.append(loss_holder["value"])
            next(bar_iter, None)
            if cfg.max_steps is not None and len(history) >= cfg.max_steps:
                done = True
                break
        logger.debug(f"epoch {epoch + 1}/{epochs} last loss {history[-1]:.5f}")
        if done:
            break
    bar.close()
    model.eval()
    if history:
        logger.info(f"Trained {len(history)} steps, loss {history[0]:.5f} -> {history[-1]:.5f}")
    else:
        logger.info("Trained 0 steps")

    if checkpoint_dir is not None:
        save_checkpoint(model, state, checkpoint_dir)
    return TrainResult(model=model, state=state, history=history)


def save_checkpoint(model: DynGhost, state: AdamWState, directory: str | Path, extra: dict | None = None) -> Path:
    """One GTF per named parameter plus ``manifest.json``."""
    directory = Path(directory)
    names = []
    for name, p in model.named_parameters():
        save_array(p.detach().numpy(), directory / f"{name}.gtf")
        names.append(name)
    manifest = {
        "config": model.config.model_dump(),
        "step": state.step,
        "optimizer": state.hyperparameters(),
        "parameters": names,
        **(extra or {}),
    }
    write_json(directory / "manifest.json", manifest)
    logger.info(f"Saved checkpoint to {directory}")
    return directory


def load_checkpoint(directory: str | Path) -> tuple[DynGhost, dict]:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"No checkpoint manifest at {manifest_path}")
    manifest = read_json(manifest_path)
    model = DynGhost(DynGhostConfig(**manifest["config"]))
    params = dict(model.named_parameters())
    with torch.no_grad():
        for name in manifest["parameters"]:
            params[name].copy_(torch.from_numpy(load_array(directory / f"{name}.gtf")).reshape(params[name].shape))
    model.eval()
    return model, manifest
