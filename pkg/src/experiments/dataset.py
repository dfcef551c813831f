"""
Benchmark assembly: patterns, scenes and bucket series for a config, plus
the on-disk dataset layout written by ``simulate``.

Every random draw comes from a substream of ``seeds.master`` labelled by
what it is for ("patterns", ("scene", split, s), ("detector", tag, name, s, t)),
so a piece can be regenerated without replaying the others.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.linear_model import LinearRegression

from src.analysis.normalize import Normalizer, fit
from src.core.rng import derive_stream_id, rng_substream
from src.core.tensor import load_array, save_array
from src.experiments.config import ExperimentConfig
from src.ingestion.frames import load_external_frames
from src.simulation.measurement import BucketSeries, classical_detect, ideal_intensity, sigma_for_snr
from src.simulation.patterns import PatternSet, binarize, generate_bernoulli, generate_speckle
from src.simulation.qdetector import DetectorSpec, counts_to_intensity, detect_counts, preset
from src.simulation.scene import MotionSpec, SceneSequence, random_scene
from src.utils.errors import ConfigError, ShapeError
from src.utils.io import read_json, write_json
from src.utils.logger import get_logger, progress

logger = get_logger("Dataset")


@dataclass
class Dataset:
    patterns: PatternSet
    scenes: list[SceneSequence]
    buckets: list[BucketSeries]
    detector: str


def build_patterns(cfg: ExperimentConfig) -> PatternSet:
    rng = rng_substream(cfg.seeds.master, derive_stream_id("patterns"))
    p = cfg.patterns
    if p.kind == "speckle":
        ps = generate_speckle(p.M, cfg.scene.H, cfg.scene.W, p.grain_px, rng)
    else:
        ps = generate_bernoulli(p.M, cfg.scene.H, cfg.scene.W, p.p, rng)
    return binarize(ps) if p.binarize else ps


def build_scenes(
    cfg: ExperimentConfig,
    split: str = "eval",
    count: int | None = None,
    T: int | None = None,
    speed: float | None = None,
    motion_kinds: list[str] | None = None,
) -> list[SceneSequence]:
    """Sprite kinds and motion kinds cycle with the sequence index so every kind is represented."""
    sc = cfg.scene
    T = T or sc.T
    if sc.external_frames_dir:
        return _external_scenes(cfg, T)
    count = count or (sc.sequences if split == "eval" else sc.train_sequences)
    kinds = motion_kinds or sc.motion_kinds
    scenes = []
    for s in range(count):
        scenes.append(random_scene(
            master_seed=cfg.seeds.master,
            index=f"{split}-{s}",
            T=T,
            shape=(sc.H, sc.W),
            sprite_kind=sc.sprite_kinds[s % len(sc.sprite_kinds)],
            sprite_size=sc.sprite_size,
            motion_kind=kinds[s % len(kinds)],
            speed=sc.speed if speed is None else speed,
        ))
    return scenes


def _external_scenes(cfg: ExperimentConfig, T: int) -> list[SceneSequence]:
    full = load_external_frames(cfg.scene.external_frames_dir)
    if (full.H, full.W) != (cfg.scene.H, cfg.scene.W):
        raise ConfigError(f"external frames are {full.H}x{full.W}, config expects {cfg.scene.H}x{cfg.scene.W}")
    if full.T < T:
        raise ConfigError(f"external sequence has {full.T} frames, fewer than T={T}")
    return [SceneSequence(frames=full.frames[k:k + T], metadata=full.metadata) for k in range(0, full.T - T + 1, T)]


def detector_spec(cfg: ExperimentConfig, name: str) -> DetectorSpec:
    return preset(name, integration_time=cfg.detector.integration_time)


def classical_sigma(cfg: ExperimentConfig, mu: np.ndarray, snr_db: float | None = None) -> float:
    """Noise level for the classical detector: sweep SNR, then explicit sigma, then target SNR, else noiseless."""
    if snr_db is not None:
        return sigma_for_snr(mu, snr_db)
    if cfg.detector.sigma is not None:
        return cfg.detector.sigma
    # an all-dark scene has no signal power to set a noise level from
    if cfg.detector.snr_db is not None and np.any(mu):
        return sigma_for_snr(mu, cfg.detector.snr_db)
    return 0.0


def simulate_buckets(
    cfg: ExperimentConfig,
    ps: PatternSet,
    scenes: list[SceneSequence],
    detector: str,
    tag: str = "eval",
    n_bar: float | None = None,
    spec: DetectorSpec | None = None,
    snr_db: float | None = None,
) -> list[BucketSeries]:
    master = cfg.seeds.master
    n_bar = n_bar or cfg.detector.n_bar
    series = []
    for s, scene in enumerate(progress(scenes, desc=f"detect {detector}")):
        mu = ideal_intensity(ps, scene)
        if detector == "classical":
            sigma = classical_sigma(cfg, mu, snr_db)
            rng = rng_substream(master, derive_stream_id("detector", tag, "classical", s))
            series.append(classical_detect(mu, sigma, rng))
        else:
            det_spec = spec or detector_spec(cfg, detector)
            streams = [rng_substream(master, derive_stream_id("detector", tag, det_spec.name, s, t)) for t in range(scene.T)]
            series.append(detect_counts(mu, n_bar, det_spec, streams))
    return series


def model_inputs(bs: BucketSeries, normalizer: Normalizer | None = None) -> np.ndarray:
    """
    Network input for one series. Analog buckets pass through; counts go
    through the normalizer, or are divided by n_bar when there is none.
    """
    if bs.mode == "analog":
        return bs.values
    if normalizer is None:
        return bs.values / bs.n_bar
    return normalizer.apply(bs.values)


class IntensityCalibration:
    """
    Affine map from normalised counts back to the intensity scale, fitted by
    least squares against the ideal training intensities. Affine
    normalizations all calibrate to the same intensities; nonlinear ones
    change what the solver sees.
    """

    def __init__(self, normalizer: Normalizer):
        self.normalizer = normalizer
        self.regression: LinearRegression | None = None

    def fit(self, counts: list[BucketSeries], mus: list[np.ndarray]) -> "IntensityCalibration":
        z = np.concatenate([self.normalizer.apply(b.values).reshape(-1) for b in counts])
        mu = np.concatenate([np.asarray(m, dtype=np.float64).reshape(-1) for m in mus])
        if z.size != mu.size:
            raise ShapeError(f"{z.size} training counts but {mu.size} intensities")
        self.regression = LinearRegression().fit(z.reshape(-1, 1), mu)
        logger.debug(f"{self.normalizer.kind} calibration: slope={self.regression.coef_[0]:.4g} "
                     f"intercept={self.regression.intercept_:.4g}")
        return self

    def apply(self, counts: np.ndarray) -> np.ndarray:
        if self.regression is None:
            raise ValueError("Run fit() first")
        z = self.normalizer.apply(np.asarray(counts, dtype=np.float64))
        return np.clip(self.regression.predict(z.reshape(-1, 1)).reshape(z.shape), 0.0, 1.0)


def fit_calibration(
    cfg: ExperimentConfig, ps: PatternSet, detector: str, normalizer: Normalizer | None = None
) -> tuple[Normalizer, IntensityCalibration]:
    """
    Normalizer and intensity calibration for ``detector``, both fitted on the
    training split only. Without a normalizer, a ``cfg.normalization.kind`` one
    is fitted on the pooled training counts.
    """
    scenes = build_scenes(cfg, "train")
    counts = simulate_buckets(cfg, ps, scenes, detector, tag="train")
    if normalizer is None:
        normalizer = fit(cfg.normalization.kind, np.concatenate([b.values.reshape(-1) for b in counts]))
    calibration = IntensityCalibration(normalizer).fit(counts, [ideal_intensity(ps, s) for s in scenes])
    return normalizer, calibration


def solver_intensity(bs: BucketSeries, calibration: IntensityCalibration | None = None) -> np.ndarray:
    """
    Intensity-scale buckets for classical solvers. Analog buckets pass
    through. Counts go through a fitted calibration when one is given,
    otherwise the dark mean is removed and the photon budget divided out.
    """
    if bs.mode == "analog":
        return bs.values
    if calibration is not None:
        return calibration.apply(bs.values)
    return counts_to_intensity(bs.values, bs.n_bar, DetectorSpec(**bs.spec))


def write_dataset(cfg: ExperimentConfig, ds: Dataset, config_hash: str) -> Path:
    root = cfg.dataset_dir
    save_array(np.stack([s.frames for s in ds.scenes]), root / "scenes.gtf")
    ds.patterns.save(root / "patterns.gtf")

    bucket_file = root / f"buckets_{ds.detector}.gtf"
    save_array(np.stack([b.values for b in ds.buckets]), bucket_file)
    sidecar = {**ds.buckets[0].sidecar(), "config_hash": config_hash, "sigma_per_sequence": [b.sigma for b in ds.buckets]}
    write_json(bucket_file.with_suffix(".json"), sidecar)

    motion = [
        {
            "motion": s.motion.model_dump(mode="json") if s.motion else None,
            "sprite_kind": s.sprite_kind,
            "centers": s.centers.tolist() if s.centers is not None else None,
        }
        for s in ds.scenes
    ]
    write_json(root / "motion.json", {"config_hash": config_hash, "sequences": motion})

    manifest = root / "manifest.json"
    write_json(manifest, {
        "config_hash": config_hash,
        "config": cfg.model_dump(mode="json"),
        "detector": ds.detector,
        "files": {
            "scenes": "scenes.gtf",
            "patterns": "patterns.gtf",
            "buckets": bucket_file.name,
            "motion": "motion.json",
        },
        "sampling_ratio": ds.patterns.M / (ds.patterns.H * ds.patterns.W),
        "patterns_kind": ds.patterns.kind,
        "synthetic_patterns": True,
    })
    return manifest


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    root = cfg.dataset_dir
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"No dataset at {root}; run 'simulate' first")
    manifest = read_json(manifest_path)
    files = manifest["files"]
    scenes_arr = load_array(root / files["scenes"])
    motion = read_json(root / files["motion"])["sequences"]
    scenes = []
    for frames, meta in zip(scenes_arr, motion):
        scenes.append(SceneSequence(
            frames=np.clip(frames, 0.0, 1.0),
            motion=MotionSpec(**meta["motion"]) if meta["motion"] else None,
            centers=np.array(meta["centers"]) if meta["centers"] else None,
            sprite_kind=meta["sprite_kind"],
        ))
    patterns = PatternSet(patterns=np.clip(load_array(root / files["patterns"]), 0.0, 1.0), kind=manifest["patterns_kind"])

    bucket_path = root / files["buckets"]
    values = load_array(bucket_path)
    side = read_json(bucket_path.with_suffix(".json"))
    sigmas = side.get("sigma_per_sequence") or [side.get("sigma")] * len(values)
    buckets = [
        BucketSeries(
            values=v if side["mode"] == "analog" else np.round(v),
            mode=side["mode"], detector=side["detector"], seed=side.get("seed"),
            n_bar=side.get("n_bar"), sigma=sig, spec=side.get("spec"),
        )
        for v, sig in zip(values, sigmas)
    ]
    return Dataset(patterns=patterns, scenes=scenes, buckets=buckets, detector=manifest["detector"])
