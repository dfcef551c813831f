"""
Experiment configuration. One JSON document, every field defaulted, unknown
keys rejected in every section.
"""

import hashlib
import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.analysis.classical.fista import FistaConfig
from src.analysis.deep_learning.config import ABLATION_VARIANTS, DynGhostConfig
from src.analysis.deep_learning.trainer import TrainingConfig
from src.analysis.normalize import NormalizerKind
from src.simulation.scene import MOTION_KINDS, SPRITE_KINDS, MotionKind, SpriteKind
from src.utils import settings
from src.utils.errors import ConfigError

DetectorName = Literal["classical", "snspd", "spad", "sipm"]
MethodName = Literal["dgi", "pi", "fista", "dynghost"]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SceneConfig(_Section):
    H: int = Field(16, ge=11)
    W: int = Field(16, ge=11)
    T: int = Field(4, ge=1)
    sequences: int = Field(8, ge=1, description="evaluation sequences")
    train_sequences: int = Field(16, ge=1)
    sprite_kinds: list[SpriteKind] = Field(default_factory=lambda: list(SPRITE_KINDS))
    sprite_size: float = Field(4.0, gt=0.0)
    motion_kinds: list[MotionKind] = Field(default_factory=lambda: list(MOTION_KINDS))
    speed: float = Field(1.0, ge=0.0, le=50.0)
    external_frames_dir: str | None = None


class PatternConfig(_Section):
    kind: Literal["speckle", "bernoulli"] = "speckle"
    M: int = Field(24, ge=1)
    grain_px: float = Field(2.0, ge=1.0)
    p: float = Field(0.5, gt=0.0, lt=1.0)
    binarize: bool = False


class DetectorConfig(_Section):
    name: DetectorName = "classical"
    n_bar: float = Field(100.0, gt=0.0)
    integration_time: float = Field(1e-3, gt=0.0)
    # an explicit sigma wins over the target SNR
    sigma: float | None = Field(None, ge=0.0)
    snr_db: float | None = 30.0
    compare: list[DetectorName] = Field(default_factory=lambda: ["classical", "snspd", "spad", "sipm"])


class NormalizationConfig(_Section):
    kind: NormalizerKind = "anscombe"
    consumer: Literal["model", "linear_probe", "classical"] = "linear_probe"
    calibration_lambda: float = Field(100.0, gt=0.0)
    contrast_lambdas: tuple[float, float] = (10.0, 1000.0)
    variance_draws: int = Field(100_000, ge=100)
    probe_alpha: float = Field(1e-2, ge=0.0)


class ReconstructorConfig(_Section):
    methods: list[MethodName] = Field(default_factory=lambda: ["dgi", "pi", "fista"])
    fista: FistaConfig = Field(default_factory=FistaConfig)
    checkpoint: str | None = None
    base_checkpoint: str | None = None
    quantum_checkpoint: str | None = None
    record_timing: bool = False


class ModelConfig(_Section):
    embed_dim: int = 16
    head_count: int = 2
    spatial_blocks: int = 2
    temporal_blocks: int = 2
    mlp_hidden: int = 32
    head_hidden: int = 64
    seed: int = Field(0, ge=0)

    def to_dynghost(self, T: int, M: int, H: int, W: int) -> DynGhostConfig:
        return DynGhostConfig(T=T, M=M, H=H, W=W, **self.model_dump())


class SeedConfig(_Section):
    master: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)


class TrainingSection(TrainingConfig):
    noise: Literal["configured", "classical"] = Field(
        "configured", description="'classical' trains the Gaussian-noise base model regardless of detector.name"
    )


class SweepConfig(_Section):
    snr_db: list[float] = Field(default_factory=lambda: [30.0, 20.0, 15.0, 10.0, 5.0, 0.0])
    drop_rates: list[float] = Field(default_factory=lambda: [0.0])
    speeds: list[float] = Field(default_factory=lambda: [1.0, 2.0, 5.0, 10.0, 20.0, 50.0])
    sequence_lengths: list[int] = Field(default_factory=list)
    ablation_variants: list[str] = Field(default_factory=lambda: list(ABLATION_VARIANTS))
    gradcheck_probes: int = Field(200, ge=1)
    gradcheck_h: float = Field(1e-5, ge=1e-6, le=1e-4)
    regime_base: Literal["snspd", "spad", "sipm"] = "spad"
    regime_n_bar: list[float] = Field(default_factory=lambda: [10.0, 100.0, 1000.0])
    regime_dark_count_rate: list[float] = Field(default_factory=lambda: [10.0, 1000.0, 100000.0])
    regime_efficiency: list[float] = Field(default_factory=lambda: [0.5, 0.7, 0.95])


class ExperimentConfig(_Section):
    scene: SceneConfig = Field(default_factory=SceneConfig)
    patterns: PatternConfig = Field(default_factory=PatternConfig)
    detector: DetectorConfig = Field(default_factory=DetectorConfig)
    normalization: NormalizationConfig = Field(default_factory=NormalizationConfig)
    reconstructors: ReconstructorConfig = Field(default_factory=ReconstructorConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    seeds: SeedConfig = Field(default_factory=SeedConfig)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    training: TrainingSection = Field(default_factory=TrainingSection)
    sweeps: SweepConfig = Field(default_factory=SweepConfig)

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def dynghost_config(self, T: int | None = None) -> DynGhostConfig:
        return self.model.to_dynghost(T or self.scene.T, self.patterns.M, self.scene.H, self.scene.W)

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    @property
    def dataset_dir(self) -> Path:
        return self.out / "dataset"


def load_config(
    path: str | Path | None = None,
    seed: int | None = None,
    out: str | Path | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Read a JSON config (or defaults), then apply ``--seed`` / ``--out`` and dict overrides."""
    payload: dict = {}
    if path is not None:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"Cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config {path} is not valid JSON: {exc}") from exc
    for section, values in (overrides or {}).items():
        if isinstance(values, dict):
            payload.setdefault(section, {}).update(values)
        else:
            payload[section] = values
    if seed is not None:
        payload.setdefault("seeds", {})["master"] = seed
    if out is not None:
        payload["output_dir"] = str(out)
    try:
        return ExperimentConfig(**payload)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration:\n{exc}") from exc
