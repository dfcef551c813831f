import math

import numpy as np
import pytest

from src.core.rng import rng_substream
from src.simulation.qdetector import (
    DetectorSpec,
    apply_dead_time,
    counts_to_intensity,
    detect_counts,
    preset,
    signal_to_dark_ratio,
)
from src.utils.errors import ConfigError, DomainError


def test_presets():
    snspd, spad, sipm = preset("snspd"), preset("spad"), preset("sipm")
    assert (snspd.efficiency, snspd.dark_count_rate) == (0.95, 10.0)
    assert sipm.crosstalk_prob == 0.05
    assert spad.afterpulse_prob == 0.01 and spad.timing_jitter_ps == 300.0
    assert preset("SNSPD").name == "snspd"
    with pytest.raises(ConfigError):
        preset("pmt")


def test_dark_mean():
    assert preset("sipm").dark_mean == pytest.approx(100.0)


def test_dead_time_cap():
    spec = preset("snspd")
    assert spec.count_cap == 25000
    assert apply_dead_time(100, spec) == 100
    assert apply_dead_time(30000, spec) == 25000
    free = DetectorSpec(name="ideal", efficiency=1.0, dark_count_rate=0.0)
    assert apply_dead_time(10**6, free) == 10**6


@pytest.mark.parametrize("name, ratio", [("sipm", 0.5), ("snspd", 9500.0), ("spad", 70.0)])
def test_signal_to_dark_ratio(name, ratio):
    assert signal_to_dark_ratio(1.0, 100.0, preset(name)) == pytest.approx(ratio)


def test_no_dark_counts_ratio_is_infinite():
    spec = DetectorSpec(name="ideal", efficiency=1.0, dark_count_rate=0.0)
    assert math.isinf(signal_to_dark_ratio(1.0, 100.0, spec))


def test_snspd_mean_counts():
    mu = np.ones((100, 1000))
    counts = detect_counts(mu, 100.0, preset("snspd"), rng_substream(7, 6)).values
    assert abs(counts.mean() - 95.01) < 0.3


def test_zero_rates_give_zero_counts():
    spec = DetectorSpec(name="ideal", efficiency=0.9, dark_count_rate=0.0)
    assert not detect_counts(np.zeros((3, 4)), 100.0, spec, rng_substream(7, 0)).values.any()


def test_counts_are_poisson_without_extras():
    spec = DetectorSpec(name="plain", efficiency=0.8, dark_count_rate=2000.0)
    n = 100_000
    counts = detect_counts(np.full((100, 1000), 0.25), 50.0, spec, rng_substream(7, 8)).values
    lam = 0.25 * 50.0 * 0.8 + 2.0
    assert abs(counts.mean() - lam) < 5 * math.sqrt(lam / n)
    assert abs(counts.var() - lam) < 5 * math.sqrt((lam * (1 + 3 * lam) - lam ** 2) / n)


def test_mean_counts_monotone_in_efficiency():
    mu = np.full((10, 1000), 0.5)
    low = DetectorSpec(name="low", efficiency=0.5, dark_count_rate=10.0)
    high = DetectorSpec(name="high", efficiency=0.9, dark_count_rate=10.0)
    a = detect_counts(mu, 20.0, low, rng_substream(7, 9)).values.mean()
    b = detect_counts(mu, 20.0, high, rng_substream(7, 9)).values.mean()
    assert b >= a


def test_per_frame_streams_are_independent_of_other_frames():
    spec = preset("spad")
    mu = np.full((3, 6), 0.4)
    streams = [rng_substream(7, 100 + t) for t in range(3)]
    full = detect_counts(mu, 100.0, spec, streams).values
    last = detect_counts(mu[2:], 100.0, spec, [rng_substream(7, 102)]).values
    assert np.array_equal(full[2:], last)


def test_detect_counts_validation():
    spec = preset("snspd")
    with pytest.raises(DomainError):
        detect_counts(np.full((1, 2), 1.5), 100.0, spec, rng_substream(7, 0))
    with pytest.raises(DomainError):
        detect_counts(np.full((2, 2), 0.5), 100.0, spec, [rng_substream(7, 0)])


def test_sidecar_carries_spec():
    bs = detect_counts(np.full((1, 2), 0.5), 10.0, preset("sipm"), rng_substream(7, 0))
    assert bs.spec["crosstalk_prob"] == 0.05
    assert bs.mode == "counts" and bs.detector == "sipm"


def test_counts_to_intensity():
    spec = preset("snspd")
    est = counts_to_intensity(np.array([[95.01, 0.0, 500.0]]), 100.0, spec)
    assert est[0, 0] == pytest.approx(1.0)
    assert est[0, 1] == 0.0 and est[0, 2] == 1.0
