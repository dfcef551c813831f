"""
Experiment tools for MCP
"""

import pandas as pd
from mcp.types import TextContent
from pydantic import Field

from src.experiments import commands, load_config
from src.mcp.server import mcp_server
from src.simulation.qdetector import preset, signal_to_dark_ratio


def _table(path) -> str:
    return pd.read_csv(path).drop(columns=["config_hash"]).to_string(index=False)


def _error(e: Exception, **metadata) -> TextContent:
    return TextContent(type="text", text=f"Error: {str(e)}", metadata=metadata)


@mcp_server.tool()
def simulate_dataset(
    out: str = Field(..., description="Output directory"),
    detector: str = Field("classical", description="classical, snspd, spad or sipm"),
    seed: int | None = Field(None, description="Master seed"),
    config_path: str | None = Field(None, description="Optional JSON experiment config"),
) -> TextContent:
    """
    Simulate scenes, patterns and bucket measurements into ``out/dataset``
    """
    try:
        cfg = load_config(config_path, seed, out, {"detector": {"name": detector}})
        manifest = commands.cmd_simulate(cfg)
        return TextContent(
            type="text",
            text=f"Dataset written to {manifest.parent} ({cfg.scene.sequences} sequences, detector {detector})",
            metadata={"manifest": str(manifest), "config_hash": cfg.config_hash()},
        )
    except Exception as e:
        return _error(e, out=out, detector=detector)


@mcp_server.tool()
def reconstruct_dataset(
    out: str = Field(..., description="Directory holding a simulated dataset"),
    methods: list[str] = Field(["dgi", "pi", "fista"], description="Reconstructors to run"),
    config_path: str | None = Field(None, description="Optional JSON experiment config"),
) -> TextContent:
    """
    Reconstruct a simulated dataset and report per-frame MSE / SSIM
    """
    try:
        cfg = load_config(config_path, None, out, {"reconstructors": {"methods": methods}})
        path = commands.cmd_reconstruct(cfg)
        return TextContent(
            type="text",
            text=f"Reconstruction metrics:\n{_table(path)}",
            metadata={"csv": str(path), "methods": methods},
        )
    except Exception as e:
        return _error(e, out=out, methods=methods)


@mcp_server.tool()
def detector_compare(
    out: str = Field(..., description="Output directory"),
    config_path: str | None = Field(None, description="Optional JSON experiment config"),
) -> TextContent:
    """
    Compare classical and photon-counting detectors on the same scenes
    """
    try:
        cfg = load_config(config_path, None, out)
        path = commands.cmd_detector_compare(cfg)
        return TextContent(type="text", text=f"Detector comparison:\n{_table(path)}", metadata={"csv": str(path)})
    except Exception as e:
        return _error(e, out=out)


@mcp_server.tool()
def normalize_sweep(
    out: str = Field(..., description="Output directory"),
    consumer: str = Field("linear_probe", description="model, linear_probe or classical"),
    config_path: str | None = Field(None, description="Optional JSON experiment config"),
) -> TextContent:
    """
    Variance stabilisation and reconstruction quality of every count normalization
    """
    try:
        cfg = load_config(config_path, None, out, {"normalization": {"consumer": consumer}})
        path = commands.cmd_normalize_sweep(cfg)
        return TextContent(type="text", text=f"Normalization sweep:\n{_table(path)}",
                           metadata={"csv": str(path), "consumer": consumer})
    except Exception as e:
        return _error(e, out=out, consumer=consumer)


@mcp_server.tool()
def snr_sweep(
    out: str = Field(..., description="Directory holding a simulated dataset"),
    snr_db: list[float] = Field([30.0, 20.0, 10.0, 0.0], description="Target SNRs in dB"),
    config_path: str | None = Field(None, description="Optional JSON experiment config"),
) -> TextContent:
    """
    Reconstruction quality against analog detector SNR
    """
    try:
        cfg = load_config(config_path, None, out, {"sweeps": {"snr_db": snr_db}})
        path = commands.cmd_snr_sweep(cfg)
        return TextContent(type="text", text=f"SNR sweep:\n{_table(path)}", metadata={"csv": str(path)})
    except Exception as e:
        return _error(e, out=out)


@mcp_server.tool()
def detector_arithmetic(
    detector: str = Field(..., description="snspd, spad or sipm"),
    n_bar: float = Field(100.0, description="Mean photons per pattern at full intensity"),
    integration_time: float = Field(1e-3, description="Integration window in seconds"),
) -> TextContent:
    """
    Dark-count mean, dead-time cap and signal-to-dark ratio of a detector preset
    """
    try:
        spec = preset(detector, integration_time)
        ratio = signal_to_dark_ratio(1.0, n_bar, spec)
        return TextContent(
            type="text",
            text=(f"{spec.name}: dark mean {spec.dark_mean:g} counts/window, "
                  f"count cap {spec.count_cap}, signal-to-dark {ratio:g}"),
            metadata={"spec": spec.model_dump(), "dark_mean": spec.dark_mean,
                      "count_cap": spec.count_cap, "signal_to_dark_ratio": ratio},
        )
    except Exception as e:
        return _error(e, detector=detector)
