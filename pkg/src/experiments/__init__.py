from src.experiments.commands import (
    cmd_ablate,
    cmd_detector_compare,
    cmd_gradcheck,
    cmd_motion_report,
    cmd_normalize_sweep,
    cmd_reconstruct,
    cmd_regime,
    cmd_simulate,
    cmd_snr_sweep,
    cmd_speed_sweep,
    cmd_train,
)
from src.experiments.config import ExperimentConfig, load_config

__all__ = [
    "ExperimentConfig",
    "cmd_ablate",
    "cmd_detector_compare",
    "cmd_gradcheck",
    "cmd_motion_report",
    "cmd_normalize_sweep",
    "cmd_reconstruct",
    "cmd_regime",
    "cmd_simulate",
    "cmd_snr_sweep",
    "cmd_speed_sweep",
    "cmd_train",
    "load_config",
]
