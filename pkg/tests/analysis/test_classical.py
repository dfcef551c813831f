import numpy as np
import pytest
from scipy.fft import idctn

from src.analysis.classical import (
    DGIReconstructor,
    FistaConfig,
    LinearProbeReconstructor,
    PseudoInverseReconstructor,
    build_reconstructor,
    dct2,
    dgi,
    dgi_raw,
    fista_solve,
    idct2,
    pseudo_inverse_raw,
    soft_threshold,
)
from src.core.rng import rng_substream
from src.simulation.measurement import ideal_intensity
from src.simulation.patterns import PatternSet, generate_bernoulli, sensing_matrix
from src.simulation.scene import SceneSequence, random_scene
from src.utils.errors import ConfigError, ShapeError


def _uniform_patterns(M, H, W, stream=0):
    values = rng_substream(7, stream).uniforms(M * H * W).reshape(M, H, W)
    return PatternSet(patterns=values)


# ------------------------------------------------------------ transforms

def test_soft_threshold():
    assert soft_threshold(1.0, 0.3) == pytest.approx(0.7)
    assert soft_threshold(-1.0, 0.3) == pytest.approx(-0.7)
    assert soft_threshold(0.2, 0.3) == 0.0


def test_dct_of_constant_is_dc_only():
    coeffs = dct2(np.full((8, 8), 0.25))
    assert coeffs[0, 0] == pytest.approx(0.25 * 8, abs=1e-12)
    coeffs[0, 0] = 0.0
    assert np.abs(coeffs).max() < 1e-12


def test_dct_is_orthonormal():
    x = rng_substream(7, 1).uniforms(256).reshape(16, 16)
    assert np.abs(idct2(dct2(x)) - x).max() < 1e-10
    assert np.linalg.norm(dct2(x)) == pytest.approx(np.linalg.norm(x), abs=1e-10)


# -------------------------------------------------------------------- DGI

def test_dgi_single_measurement_is_zero():
    ps = _uniform_patterns(1, 6, 6)
    assert np.allclose(dgi_raw(ps, np.array([0.7])), 0.0, atol=1e-12)
    assert not dgi(ps, np.array([0.7])).any()


def test_dgi_matches_brute_force():
    ps = _uniform_patterns(50, 8, 8, stream=2)
    b = rng_substream(7, 3).uniforms(50)
    R = ps.row_sums
    expected = np.zeros((8, 8))
    for i in range(50):
        expected += b[i] * ps.patterns[i]
    expected /= 50
    correction = np.zeros((8, 8))
    for i in range(50):
        correction += R[i] * ps.patterns[i]
    correction /= 50
    expected -= (b.mean() / R.mean()) * correction
    assert np.abs(dgi_raw(ps, b) - expected).max() < 1e-12


def test_dgi_delta_patterns_recover_ranking(delta_patterns):
    x = rng_substream(7, 4).uniforms(121)
    est = dgi(delta_patterns, x)
    assert np.corrcoef(est.reshape(-1), x)[0, 1] == pytest.approx(1.0, abs=1e-9)


def test_dgi_wrong_size(toy_patterns):
    with pytest.raises(ShapeError):
        dgi_raw(toy_patterns, np.ones(3))


# ------------------------------------------------------------ pseudo-inverse

def test_pi_identity_system(delta_patterns):
    x = rng_substream(7, 5).uniforms(121)
    assert np.allclose(pseudo_inverse_raw(delta_patterns, x).reshape(-1), x, atol=1e-12)


def test_pi_full_rank_square():
    ps = _uniform_patterns(64, 8, 8, stream=6)
    x = rng_substream(7, 7).uniforms(64)
    b = sensing_matrix(ps) @ x
    assert np.abs(pseudo_inverse_raw(ps, b).reshape(-1) - x).max() < 1e-8


def test_pi_underdetermined_residual(toy_patterns):
    x = rng_substream(7, 8).uniforms(256)
    Psi = sensing_matrix(toy_patterns)
    b = Psi @ x
    est = pseudo_inverse_raw(toy_patterns, b).reshape(-1)
    assert np.abs(Psi @ est - b).max() < 1e-8


def test_pi_reports_cold_and_warm_timings(toy_patterns):
    recon = PseudoInverseReconstructor(toy_patterns)
    recon.reconstruct(np.full((3, 24), 0.5))
    meta = recon.get_metadata_dict()
    assert meta["cold_ms"] >= 0.0 and meta["warm_ms"] >= 0.0
    assert len(meta["time_ms"]) == 3


# --------------------------------------------------------------------- FISTA

def test_fista_zero_data_gives_zero(toy_patterns):
    result = fista_solve(toy_patterns, np.zeros(24), FistaConfig(lambda_reg=0.1, iterations=20))
    assert not result.raw.any()


def test_fista_objective_tracking():
    ps = generate_bernoulli(256, 16, 16, 0.5, rng_substream(7, 9))
    x = rng_substream(7, 10).uniforms(256)
    b = sensing_matrix(ps) @ x
    result = fista_solve(ps, b, FistaConfig(lambda_reg=0.0, iterations=100))
    assert result.residual[-1] < result.residual[0]
    assert all(a >= c for a, c in zip(result.best_objective, result.best_objective[1:]))
    assert result.lipschitz > 0


def test_fista_config_rejects_few_power_iterations():
    with pytest.raises(ValueError):
        FistaConfig(power_iterations=10)


@pytest.mark.slow
def test_fista_recovers_sparse_dct_signal():
    coeffs = np.zeros((16, 16))
    coeffs[1, 2], coeffs[3, 0], coeffs[2, 5], coeffs[6, 1] = 1.0, -0.8, 0.6, 0.9
    x = idctn(coeffs, norm="ortho")
    ps = generate_bernoulli(128, 16, 16, 0.5, rng_substream(7, 11))
    b = sensing_matrix(ps) @ x.reshape(-1)
    result = fista_solve(ps, b, FistaConfig(iterations=200, box=False))
    assert np.mean((result.raw - x) ** 2) < 1e-3


def test_fista_box_keeps_iterates_in_unit_range(toy_patterns):
    b = np.linspace(0.0, 2.0, 24)
    boxed = fista_solve(toy_patterns, b, FistaConfig(iterations=30))
    assert boxed.raw.min() >= -1e-9 and boxed.raw.max() <= 1.0 + 1e-9
    free = fista_solve(toy_patterns, b, FistaConfig(iterations=30, box=False))
    assert free.raw.max() > 1.0 + 1e-6 or free.raw.min() < -1e-6


# ------------------------------------------------------------- reconstructors

def test_reconstruct_clamps_and_times(toy_patterns):
    recon = DGIReconstructor(toy_patterns)
    out = recon.reconstruct(np.full((2, 24), 0.5))
    assert out.shape == (2, 16, 16)
    assert out.min() >= 0.0 and out.max() <= 1.0
    assert len(recon.last_timing_ms) == 2


def test_reconstruct_shape_mismatch(toy_patterns):
    with pytest.raises(ShapeError):
        DGIReconstructor(toy_patterns).reconstruct(np.ones((2, 5)))


def test_masked_rows_are_left_out(delta_patterns):
    x = rng_substream(7, 12).uniforms(121)
    mask = np.ones(121, dtype=bool)
    mask[:10] = False
    corrupted = x.copy()
    corrupted[:10] = 0.9
    recon = build_reconstructor("pi", delta_patterns)
    out = recon.reconstruct(corrupted[None, :], mask[None, :]).reshape(-1)
    assert np.allclose(out[10:], x[10:], atol=1e-9)
    assert np.allclose(out[:10], 0.0)


def test_pi_noiseless_scene_is_exact():
    scene = random_scene(7, 0, 3, (11, 11), "disc", 3, "linear", 1.0)
    ps = _uniform_patterns(121, 11, 11, stream=13)
    mu = ideal_intensity(ps, scene)
    pred = build_reconstructor("pi", ps).reconstruct(mu)
    assert np.mean((pred - scene.frames) ** 2) < 1e-6


def test_unknown_method():
    with pytest.raises(ConfigError):
        build_reconstructor("art", PatternSet(patterns=np.ones((1, 2, 2))))


def test_linear_probe_learns_linear_map():
    rng = rng_substream(7, 14)
    weights = rng.uniforms(6 * 16).reshape(6, 16) / 6
    inputs = [rng.uniforms(4 * 6).reshape(4, 6) for _ in range(20)]
    truths = [(b @ weights).reshape(4, 4, 4) for b in inputs]
    probe = LinearProbeReconstructor(alpha=1e-8).fit(inputs, truths)
    assert np.allclose(probe.reconstruct(inputs[0]), truths[0], atol=1e-4)
