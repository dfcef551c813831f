from src.analysis.deep_learning.config import ABLATION_VARIANTS, LOSS_WEIGHTS, DynGhostConfig, ablation_variant
from src.analysis.deep_learning.gradients import (
    GradientCheckReport,
    backward,
    dynghost_loss_fn,
    gradient_check,
    gradients,
)
from src.analysis.deep_learning.loss import LossBreakdown, loss_total
from src.analysis.deep_learning.model import AttentionBlock, DynGhost, attention_block, embed_tokens, forward, predict
from src.analysis.deep_learning.optim import AdamWState, adamw_step
from src.analysis.deep_learning.trainer import (
    TrainingConfig,
    TrainingItem,
    TrainResult,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "ABLATION_VARIANTS",
    "AdamWState",
    "AttentionBlock",
    "DynGhost",
    "DynGhostConfig",
    "GradientCheckReport",
    "LOSS_WEIGHTS",
    "LossBreakdown",
    "TrainResult",
    "TrainingConfig",
    "TrainingItem",
    "ablation_variant",
    "adamw_step",
    "attention_block",
    "backward",
    "dynghost_loss_fn",
    "embed_tokens",
    "forward",
    "gradient_check",
    "gradients",
    "load_checkpoint",
    "loss_total",
    "predict",
    "save_checkpoint",
    "train",
]
