"""
GhostLab command line.

    ghostlab --config exp.json --seed 7 --out results simulate
    ghostlab --out results reconstruct
"""

from pathlib import Path
from typing import Optional

import torch
import typer

from src.experiments import commands, load_config
from src.experiments.config import ExperimentConfig
from src.utils import settings
from src.utils.errors import GhostLabError
from src.utils.logger import get_logger

logger = get_logger("CLI")

app = typer.Typer(name=settings.APP_NAME.lower(), help=settings.DESCRIPTION, no_args_is_help=True)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="JSON experiment config"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed (overrides the config)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory (overrides the config)"),
):
    torch.set_num_threads(settings.TORCH_THREADS)
    ctx.obj = {"config": config, "seed": seed, "out": out}


def _config(ctx: typer.Context, overrides: dict | None = None) -> ExperimentConfig:
    return load_config(ctx.obj["config"], ctx.obj["seed"], ctx.obj["out"], overrides)


def _run(ctx: typer.Context, command, overrides: dict | None = None):
    try:
        return command(_config(ctx, overrides))
    except GhostLabError as e:
        logger.error(str(e))
        raise typer.Exit(code=1)


@app.command()
def simulate(ctx: typer.Context, binarize: bool = typer.Option(False, "--binarize", help="Threshold patterns at their median")):
    """Generate scenes, patterns and bucket measurements."""
    overrides = {"patterns": {"binarize": True}} if binarize else None
    typer.echo(_run(ctx, commands.cmd_simulate, overrides))


@app.command()
def reconstruct(ctx: typer.Context):
    """Run the configured reconstructors on the simulated dataset."""
    typer.echo(_run(ctx, commands.cmd_reconstruct))


@app.command()
def train(ctx: typer.Context):
    """Train DynGhost and write a checkpoint."""
    typer.echo(_run(ctx, commands.cmd_train))


@app.command()
def gradcheck(ctx: typer.Context):
    """Compare analytic and finite-difference gradients; exits 1 above the threshold."""
    path, passed = _run(ctx, commands.cmd_gradcheck)
    typer.echo(path)
    if not passed:
        logger.error("gradient check failed")
        raise typer.Exit(code=1)


@app.command("detector-compare")
def detector_compare(ctx: typer.Context):
    """Reconstruction quality per detector, normalization and model."""
    typer.echo(_run(ctx, commands.cmd_detector_compare))


@app.command("normalize-sweep")
def normalize_sweep(ctx: typer.Context):
    """Variance stabilisation and downstream quality for every normalization."""
    typer.echo(_run(ctx, commands.cmd_normalize_sweep))


@app.command("snr-sweep")
def snr_sweep(ctx: typer.Context):
    """Reconstruction quality against analog SNR and measurement drop rate."""
    typer.echo(_run(ctx, commands.cmd_snr_sweep))


@app.command()
def ablate(ctx: typer.Context):
    """Train and evaluate the ablation variants."""
    typer.echo(_run(ctx, commands.cmd_ablate))


@app.command("speed-sweep")
def speed_sweep(ctx: typer.Context):
    """Classical reconstruction quality against sprite speed."""
    typer.echo(_run(ctx, commands.cmd_speed_sweep))


@app.command("motion-report")
def motion_report(ctx: typer.Context):
    """Per-frame SSIM of every classical method for each motion kind."""
    typer.echo(_run(ctx, commands.cmd_motion_report))


@app.command()
def regime(ctx: typer.Context):
    """Photon budget x dark-count rate x efficiency grid."""
    typer.echo(_run(ctx, commands.cmd_regime))


if __name__ == "__main__":
    app()
