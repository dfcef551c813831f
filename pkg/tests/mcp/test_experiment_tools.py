import math

from src.mcp.tools import experiment_tools


def test_detector_arithmetic_sipm():
    result = experiment_tools.detector_arithmetic(detector="sipm", n_bar=100.0, integration_time=1e-3)
    assert math.isclose(result.metadata["signal_to_dark_ratio"], 0.5)
    assert math.isclose(result.metadata["dark_mean"], 100.0)
    assert "sipm" in result.text


def test_detector_arithmetic_snspd():
    result = experiment_tools.detector_arithmetic(detector="snspd", n_bar=100.0, integration_time=1e-3)
    assert math.isclose(result.metadata["signal_to_dark_ratio"], 9500.0)


def test_unknown_detector_is_reported():
    result = experiment_tools.detector_arithmetic(detector="pmt", n_bar=100.0, integration_time=1e-3)
    assert result.text.startswith("Error:")
    assert result.metadata == {"detector": "pmt"}


def test_simulate_dataset_tool(tmp_path):
    result = experiment_tools.simulate_dataset(out=str(tmp_path), detector="spad", seed=3, config_path=None)
    assert not result.text.startswith("Error:")
    assert (tmp_path / "dataset" / "buckets_spad.gtf").is_file()


def test_reconstruct_without_dataset_is_reported(tmp_path):
    result = experiment_tools.reconstruct_dataset(out=str(tmp_path), methods=["dgi"], config_path=None)
    assert result.text.startswith("Error:")
