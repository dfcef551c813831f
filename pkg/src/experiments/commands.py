"""
Experiment commands shared by the CLI and the MCP tools. Each takes a
validated ExperimentConfig, writes its outputs atomically under
``cfg.output_dir`` and returns the path of its main output.
"""

import math
import time
from pathlib import Path

import numpy as np

from src.analysis.classical import build_reconstructor
from src.analysis.classical.linear_probe import LinearProbeReconstructor
from src.analysis.deep_learning import (
    DynGhost,
    TrainingConfig,
    TrainingItem,
    ablation_variant,
    dynghost_loss_fn,
    gradient_check,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from src.analysis.deep_learning.model import as_tensor
from src.analysis.metrics import evaluate_sequence, snr_db
from src.analysis.normalize import NORMALIZER_KINDS, Normalizer, fit
from src.analysis.ssim import SSIM_CONFIG
from src.core.rng import derive_stream_id, rng_substream, sample_poisson_array
from src.core.tensor import save_array
from src.experiments.config import ExperimentConfig
from src.experiments.dataset import (
    Dataset,
    build_patterns,
    build_scenes,
    detector_spec,
    fit_calibration,
    load_dataset,
    model_inputs,
    simulate_buckets,
    solver_intensity,
    write_dataset,
)
from src.experiments.reports import write_csv, write_report
from src.simulation.measurement import drop_measurements, gaussian_noise, ideal_intensity, sigma_for_snr
from src.simulation.qdetector import DetectorSpec, signal_to_dark_ratio
from src.utils.errors import ConfigError
from src.utils.logger import get_logger, progress

logger = get_logger("Experiments")

SNR_DEFINITION = "10 log10(mean(mu^2) / sigma^2)"
# signal-to-dark ratios are quoted at full-scale intensity
REFERENCE_MU = 1.0


# ---------------------------------------------------------------- helpers

def _classical_predictions(method, cfg, patterns, intensities, masks=None):
    recon = build_reconstructor(method, patterns, cfg.reconstructors.fista)
    preds, times = [], []
    for k, values in enumerate(intensities):
        preds.append(recon.reconstruct(values, None if masks is None else masks[k]))
        times.append(list(recon.last_timing_ms))
    return preds, times, recon.get_metadata_dict()


def _dynghost_predictions(model, patterns, inputs):
    preds, times = [], []
    for values in inputs:
        start = time.perf_counter()
        pred = predict(model, patterns.patterns, values)
        elapsed = (time.perf_counter() - start) * 1e3
        preds.append(pred)
        # per-frame latency = sequence latency / T
        times.append([elapsed / pred.shape[0]] * pred.shape[0])
    return preds, times


def _load_model(path: str | None, what: str) -> tuple[DynGhost, Normalizer | None]:
    if not path:
        raise ConfigError(f"{what} requested but no checkpoint is configured")
    model, manifest = load_checkpoint(path)
    nz = manifest.get("normalizer")
    return model, (Normalizer(**nz) if nz else None)


def _summaries(preds, scenes):
    return [evaluate_sequence("", p, s.frames) for p, s in zip(preds, scenes)]


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def _training_items(patterns, inputs, scenes) -> list[TrainingItem]:
    return [TrainingItem(patterns=patterns.patterns, buckets=b, truth=s.frames) for b, s in zip(inputs, scenes)]


def _train_model(cfg: ExperimentConfig, items, model_cfg=None, weights=None, seed_label="train"):
    model = DynGhost(model_cfg or cfg.dynghost_config())
    tcfg = TrainingConfig(**cfg.training.model_dump(exclude={"noise"}))
    if weights is not None:
        tcfg = tcfg.model_copy(update={"loss_weights": weights})
    rng = rng_substream(cfg.seeds.master, derive_stream_id("shuffle", seed_label))
    return train(model, items, tcfg, rng=rng)


# -------------------------------------------------------------- commands

def cmd_simulate(cfg: ExperimentConfig) -> Path:
    """Write scenes, patterns and buckets for the configured detector; returns the manifest path."""
    patterns = build_patterns(cfg)
    scenes = build_scenes(cfg, "eval")
    buckets = simulate_buckets(cfg, patterns, scenes, cfg.detector.name)
    manifest = write_dataset(cfg, Dataset(patterns, scenes, buckets, cfg.detector.name), cfg.config_hash())
    logger.info(f"Simulated {len(scenes)} sequences with detector '{cfg.detector.name}'")
    return manifest


def cmd_reconstruct(cfg: ExperimentConfig) -> Path:
    ds = load_dataset(cfg)
    config_hash = cfg.config_hash()
    T = ds.scenes[0].T
    rows = []
    for method in cfg.reconstructors.methods:
        if method == "dynghost":
            model, nz = _load_model(cfg.reconstructors.checkpoint, "dynghost")
            preds, times = _dynghost_predictions(model, ds.patterns, [model_inputs(b, nz) for b in ds.buckets])
            meta = {"method": "dynghost", "checkpoint": cfg.reconstructors.checkpoint,
                    "normalizer": nz.model_dump() if nz else None}
        else:
            preds, times, meta = _classical_predictions(
                method, cfg, ds.patterns, [solver_intensity(b) for b in ds.buckets])
        if not cfg.reconstructors.record_timing:
            times = [[0.0] * T for _ in times]
            meta = {k: v for k, v in meta.items() if k not in ("time_ms", "cold_ms", "warm_ms", "frames")}

        reports = _summaries(preds, ds.scenes)
        mse = np.array([r.mse for r in reports])
        ssim = np.array([r.ssim for r in reports])
        t_ms = np.array(times)
        for t in range(T):
            rows.append({
                "method": method, "frame": str(t),
                "mse": mse[:, t].mean(), "ssim": ssim[:, t].mean(), "time_ms": t_ms[:, t].mean(),
                "mse_std": mse[:, t].std(), "ssim_std": ssim[:, t].std(),
            })
        rows.append({
            "method": method, "frame": "summary",
            "mse": mse.mean(), "ssim": ssim.mean(), "time_ms": t_ms.mean(),
            "mse_std": mse.std(), "ssim_std": ssim.std(),
        })
        save_array(np.stack(preds), cfg.out / f"recon_{method}.gtf")
        write_report(cfg.out / f"recon_{method}.json", {**meta, "ssim_config": SSIM_CONFIG}, config_hash)
        logger.info(f"{method}: SSIM {ssim.mean():.4f}, MSE {mse.mean():.5f}")

    return write_csv(rows, cfg.out / "reconstruct.csv", config_hash,
                     ["method", "frame", "mse", "ssim", "time_ms", "mse_std", "ssim_std"])


def cmd_train(cfg: ExperimentConfig) -> Path:
    """Train DynGhost on the train split; returns the checkpoint directory."""
    patterns = build_patterns(cfg)
    scenes = build_scenes(cfg, "train")
    detector = "classical" if cfg.training.noise == "classical" else cfg.detector.name
    buckets = simulate_buckets(cfg, patterns, scenes, detector, tag="train")
    nz = None
    if buckets[0].mode == "counts":
        nz = fit(cfg.normalization.kind, np.concatenate([b.values.reshape(-1) for b in buckets]))
    items = _training_items(patterns, [model_inputs(b, nz) for b in buckets], scenes)
    result = _train_model(cfg, items)

    checkpoint = cfg.out / "checkpoint"
    save_checkpoint(result.model, result.state, checkpoint, extra={
        "normalizer": nz.model_dump() if nz else None,
        "detector": detector,
        "config_hash": cfg.config_hash(),
    })
    write_csv([{"step": i, "loss": v} for i, v in enumerate(result.history)],
              cfg.out / "train_history.csv", cfg.config_hash(), ["step", "loss"])
    return checkpoint


def cmd_gradcheck(cfg: ExperimentConfig) -> tuple[Path, bool]:
    """Finite-difference check of the configured model; returns the report path and the gate verdict."""
    patterns = build_patterns(cfg)
    scene = build_scenes(cfg, "gradcheck", count=1)[0]
    buckets = simulate_buckets(cfg, patterns, [scene], "classical", tag="gradcheck")[0]
    model = DynGhost(cfg.dynghost_config())
    loss_fn = dynghost_loss_fn(as_tensor(patterns), as_tensor(buckets.values), as_tensor(scene.frames))
    rng = rng_substream(cfg.seeds.master, derive_stream_id("gradcheck"))
    report = gradient_check(model, loss_fn, cfg.sweeps.gradcheck_probes, cfg.sweeps.gradcheck_h, rng)
    path = write_report(cfg.out / "gradcheck.json", report.to_dict(), cfg.config_hash())
    logger.info(f"max relative error {report.max_relative_error:.3e} over {len(report.probes)} probes")
    return path, report.passed()


def _eval_dynghost(model, patterns, inputs, scenes) -> dict:
    preds, _ = _dynghost_predictions(model, patterns, inputs)
    reports = _summaries(preds, scenes)
    return {
        "mse": float(np.mean([r.mse_mean for r in reports])),
        "ssim": float(np.mean([r.ssim_mean for r in reports])),
        "t_cons": float(np.mean([r.temporal_consistency for r in reports])) if scenes[0].T >= 2 else math.nan,
    }


def cmd_ablate(cfg: ExperimentConfig) -> Path:
    """Train every ablation variant on the same data and seed; also the sequence-length sweep if configured."""
    patterns = build_patterns(cfg)
    train_scenes = build_scenes(cfg, "train")
    eval_scenes = build_scenes(cfg, "eval")
    train_in = [b.values for b in simulate_buckets(cfg, patterns, train_scenes, "classical", tag="train")]
    eval_in = [b.values for b in simulate_buckets(cfg, patterns, eval_scenes, "classical", tag="eval")]
    items = _training_items(patterns, train_in, train_scenes)
    config_hash = cfg.config_hash()

    rows = []
    for variant in cfg.sweeps.ablation_variants:
        model_cfg, weights = ablation_variant(variant, cfg.dynghost_config(), cfg.training.loss_weights)
        result = _train_model(cfg, items, model_cfg, weights, seed_label="ablate")
        rows.append({"variant": variant, **_eval_dynghost(result.model, patterns, eval_in, eval_scenes)})
        logger.info(f"{variant}: {rows[-1]}")
    path = write_csv(rows, cfg.out / "ablation.csv", config_hash, ["variant", "mse", "ssim", "t_cons"])

    if cfg.sweeps.sequence_lengths:
        seq_rows = []
        for T in cfg.sweeps.sequence_lengths:
            tr = build_scenes(cfg, "train", T=T)
            ev = build_scenes(cfg, "eval", T=T)
            tr_in = [b.values for b in simulate_buckets(cfg, patterns, tr, "classical", tag=f"train-T{T}")]
            ev_in = [b.values for b in simulate_buckets(cfg, patterns, ev, "classical", tag=f"eval-T{T}")]
            result = _train_model(cfg, _training_items(patterns, tr_in, tr), cfg.dynghost_config(T=T), seed_label="ablate")
            seq_rows.append({"T": T, **_eval_dynghost(result.model, patterns, ev_in, ev)})
        write_csv(seq_rows, cfg.out / "ablation_seq_length.csv", config_hash, ["T", "mse", "ssim", "t_cons"])
    return path


def cmd_detector_compare(cfg: ExperimentConfig) -> Path:
    """
    Rows (detector x normalization x model). With both checkpoints configured
    the models are 'base' (Gaussian-trained, counts scaled by n_bar) and
    'quantum' (counts through the checkpoint's normalizer); otherwise the
    classical solvers stand in.
    """
    patterns = build_patterns(cfg)
    scenes = build_scenes(cfg, "eval")
    rc = cfg.reconstructors
    use_models = bool(rc.base_checkpoint and rc.quantum_checkpoint)
    if use_models:
        base, _ = _load_model(rc.base_checkpoint, "base model")
        quantum, quantum_nz = _load_model(rc.quantum_checkpoint, "quantum model")
    methods = [m for m in rc.methods if m != "dynghost"]
    rows = []
    for detector in cfg.detector.compare:
        buckets = simulate_buckets(cfg, patterns, scenes, detector, tag="compare")
        if detector == "classical":
            ratio = math.inf
        else:
            ratio = signal_to_dark_ratio(REFERENCE_MU, cfg.detector.n_bar, detector_spec(cfg, detector))

        if use_models:
            runs = [("base", "none", base, None), ("quantum", quantum_nz.kind if quantum_nz else "none", quantum, quantum_nz)]
            for label, nz_kind, model, nz in runs:
                if detector == "classical":
                    nz, nz_kind = None, "none"
                metrics = _eval_dynghost(model, patterns, [model_inputs(b, nz) for b in buckets], scenes)
                rows.append({"detector": detector, "normalization": nz_kind, "model": label,
                             "mse": metrics["mse"], "ssim": metrics["ssim"], "signal_to_dark_ratio": ratio})
        else:
            nz, calibration = None, None
            if buckets[0].mode == "counts":
                nz, calibration = fit_calibration(cfg, patterns, detector)
            intensities = [solver_intensity(b, calibration) for b in buckets]
            for method in methods:
                preds, _, _ = _classical_predictions(method, cfg, patterns, intensities)
                reports = _summaries(preds, scenes)
                rows.append({
                    "detector": detector, "normalization": nz.kind if nz else "none", "model": method,
                    "mse": float(np.mean([r.mse_mean for r in reports])),
                    "ssim": float(np.mean([r.ssim_mean for r in reports])),
                    "signal_to_dark_ratio": ratio,
                })
    return write_csv(rows, cfg.out / "detector_compare.csv", cfg.config_hash(),
                     ["detector", "normalization", "model", "mse", "ssim", "signal_to_dark_ratio"])


def cmd_normalize_sweep(cfg: ExperimentConfig) -> Path:
    """
    One row per normalization: post-transform variance of Poisson draws at
    the calibration rate (and at the two contrast rates with the calibration
    fit frozen), plus downstream reconstruction quality on SNSPD counts.
    """
    nc = cfg.normalization
    draws = {}
    for lam in (nc.calibration_lambda, *nc.contrast_lambdas):
        rng = rng_substream(cfg.seeds.master, derive_stream_id("normalize-variance", lam))
        draws[lam] = sample_poisson_array(rng, lam, size=nc.variance_draws).astype(np.float64)
    low, high = nc.contrast_lambdas

    patterns = build_patterns(cfg)
    train_scenes = build_scenes(cfg, "train")
    eval_scenes = build_scenes(cfg, "eval")
    train_counts = simulate_buckets(cfg, patterns, train_scenes, "snspd", tag="train")
    eval_counts = simulate_buckets(cfg, patterns, eval_scenes, "snspd", tag="eval")
    pooled = np.concatenate([b.values.reshape(-1) for b in train_counts])

    rows = []
    for kind in progress(NORMALIZER_KINDS, desc="normalizers"):
        calibrated = fit(kind, draws[nc.calibration_lambda])
        row = {
            "normalization": kind,
            "variance": float(np.var(calibrated.apply(draws[nc.calibration_lambda]))),
            "variance_low": float(np.var(calibrated.apply(draws[low]))),
            "variance_high": float(np.var(calibrated.apply(draws[high]))),
            "consumer": nc.consumer,
        }
        nz = fit(kind, pooled)
        if nc.consumer == "linear_probe":
            probe = LinearProbeReconstructor(nc.probe_alpha).fit(
                [model_inputs(b, nz) for b in train_counts], [s.frames for s in train_scenes])
            preds = [probe.reconstruct(model_inputs(b, nz)) for b in eval_counts]
        elif nc.consumer == "model":
            items = _training_items(patterns, [model_inputs(b, nz) for b in train_counts], train_scenes)
            model = _train_model(cfg, items, seed_label="normalize").model
            preds, _ = _dynghost_predictions(model, patterns, [model_inputs(b, nz) for b in eval_counts])
        else:
            method = next((m for m in cfg.reconstructors.methods if m != "dynghost"), "fista")
            _, calibration = fit_calibration(cfg, patterns, "snspd", nz)
            preds, _, _ = _classical_predictions(method, cfg, patterns, [solver_intensity(b, calibration) for b in eval_counts])
        reports = _summaries(preds, eval_scenes)
        row["mse"] = float(np.mean([r.mse_mean for r in reports]))
        row["ssim"] = float(np.mean([r.ssim_mean for r in reports]))
        rows.append(row)
    return write_csv(rows, cfg.out / "normalize_sweep.csv", cfg.config_hash(),
                     ["normalization", "variance", "variance_low", "variance_high", "mse", "ssim", "consumer"])


def cmd_snr_sweep(cfg: ExperimentConfig) -> Path:
    """
    Regenerates analog noise at each target SNR (and drop rate). The
    measured SNR is taken on mu + eps before clipping.
    """
    ds = load_dataset(cfg)
    mus = [ideal_intensity(ds.patterns, s) for s in ds.scenes]
    model = nz = None
    if "dynghost" in cfg.reconstructors.methods:
        model, nz = _load_model(cfg.reconstructors.checkpoint, "dynghost")

    rows = []
    for target in progress(cfg.sweeps.snr_db, desc="snr"):
        noisy = []
        for s, mu in enumerate(mus):
            rng = rng_substream(cfg.seeds.master, derive_stream_id("snr", target, s))
            noisy.append(gaussian_noise(mu, sigma_for_snr(mu, target), rng))
        measured = snr_db(np.concatenate([m.reshape(-1) for m in mus]), np.concatenate([n.reshape(-1) for n in noisy]))
        clipped = [np.clip(n, 0.0, 1.0) for n in noisy]

        for rate in cfg.sweeps.drop_rates:
            masked, masks = [], []
            for s, b in enumerate(clipped):
                rng = rng_substream(cfg.seeds.master, derive_stream_id("drop", target, rate, s))
                values, keep = drop_measurements(b, rate, rng)
                masked.append(values)
                masks.append(keep)
            for method in cfg.reconstructors.methods:
                if method == "dynghost":
                    preds, _ = _dynghost_predictions(model, ds.patterns, masked)
                else:
                    preds, _, _ = _classical_predictions(method, cfg, ds.patterns, masked, masks)
                reports = _summaries(preds, ds.scenes)
                mse_mean, mse_std = _mean_std([r.mse for r in reports])
                ssim_mean, ssim_std = _mean_std([r.ssim for r in reports])
                rows.append({
                    "method": method, "snr_db": target, "drop_rate": rate, "measured_snr_db": measured,
                    "mse_mean": mse_mean, "mse_std": mse_std, "ssim_mean": ssim_mean, "ssim_std": ssim_std,
                })
    path = write_csv(rows, cfg.out / "snr_sweep.csv", cfg.config_hash(),
                     ["method", "snr_db", "drop_rate", "measured_snr_db", "mse_mean", "mse_std", "ssim_mean", "ssim_std"])
    write_report(cfg.out / "snr_sweep.json", {"snr_definition": SNR_DEFINITION}, cfg.config_hash())
    return path


def _classical_rows_for(cfg, patterns, scenes, buckets) -> dict[str, list]:
    intensities = [solver_intensity(b) for b in buckets]
    out = {}
    for method in cfg.reconstructors.methods:
        if method == "dynghost":
            model, nz = _load_model(cfg.reconstructors.checkpoint, "dynghost")
            preds, _ = _dynghost_predictions(model, patterns, [model_inputs(b, nz) for b in buckets])
        else:
            preds, _, _ = _classical_predictions(method, cfg, patterns, intensities)
        out[method] = _summaries(preds, scenes)
    return out


def cmd_speed_sweep(cfg: ExperimentConfig) -> Path:
    patterns = build_patterns(cfg)
    rows = []
    for speed in progress(cfg.sweeps.speeds, desc="speed"):
        scenes = build_scenes(cfg, "eval", speed=speed)
        buckets = simulate_buckets(cfg, patterns, scenes, cfg.detector.name, tag=f"speed-{speed}")
        for method, reports in _classical_rows_for(cfg, patterns, scenes, buckets).items():
            mse_mean, mse_std = _mean_std([r.mse for r in reports])
            ssim_mean, ssim_std = _mean_std([r.ssim for r in reports])
            rows.append({"method": method, "speed": speed, "mse_mean": mse_mean, "mse_std": mse_std,
                         "ssim_mean": ssim_mean, "ssim_std": ssim_std})
    return write_csv(rows, cfg.out / "speed_sweep.csv", cfg.config_hash(),
                     ["method", "speed", "mse_mean", "mse_std", "ssim_mean", "ssim_std"])


def cmd_motion_report(cfg: ExperimentConfig) -> Path:
    patterns = build_patterns(cfg)
    rows = []
    for motion in cfg.scene.motion_kinds:
        scenes = build_scenes(cfg, "eval", motion_kinds=[motion])
        buckets = simulate_buckets(cfg, patterns, scenes, cfg.detector.name, tag=f"motion-{motion}")
        for method, reports in _classical_rows_for(cfg, patterns, scenes, buckets).items():
            ssim = np.array([r.ssim for r in reports])
            for t in range(ssim.shape[1]):
                rows.append({"method": method, "motion": motion, "frame": t, "ssim_mean": float(ssim[:, t].mean())})
    return write_csv(rows, cfg.out / "motion_report.csv", cfg.config_hash(), ["method", "motion", "frame", "ssim_mean"])


def cmd_regime(cfg: ExperimentConfig) -> Path:
    """Photon budget x dark-count rate x efficiency around a base preset."""
    sw = cfg.sweeps
    base = detector_spec(cfg, sw.regime_base)
    method = next((m for m in cfg.reconstructors.methods if m != "dynghost"), "fista")
    patterns = build_patterns(cfg)
    scenes = build_scenes(cfg, "eval")
    rows = []
    grid = [(n, d, e) for n in sw.regime_n_bar for d in sw.regime_dark_count_rate for e in sw.regime_efficiency]
    for n_bar, dcr, eff in progress(grid, desc="regime"):
        spec = DetectorSpec(**{**base.model_dump(), "dark_count_rate": dcr, "efficiency": eff,
                               "name": f"{sw.regime_base}-custom"})
        buckets = simulate_buckets(cfg, patterns, scenes, spec.name, tag=f"regime-{n_bar}-{dcr}-{eff}",
                                   n_bar=n_bar, spec=spec)
        preds, _, _ = _classical_predictions(method, cfg, patterns, [solver_intensity(b) for b in buckets])
        reports = _summaries(preds, scenes)
        rows.append({
            "n_bar": n_bar, "dark_count_rate": dcr, "efficiency": eff,
            "signal_to_dark_ratio": signal_to_dark_ratio(REFERENCE_MU, n_bar, spec),
            "method": method,
            "mse": float(np.mean([r.mse_mean for r in reports])),
            "ssim": float(np.mean([r.ssim_mean for r in reports])),
        })
    return write_csv(rows, cfg.out / "regime.csv", cfg.config_hash(),
                     ["n_bar", "dark_count_rate", "efficiency", "signal_to_dark_ratio", "method", "mse", "ssim"])
