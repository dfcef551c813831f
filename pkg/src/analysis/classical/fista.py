"""
FISTA for  min_a  1/2 ||Psi Phi a - b||^2 + lam ||a||_1,  x = Phi a,
with Phi the orthonormal 2-D inverse DCT.

The Lipschitz constant of the smooth part is the largest eigenvalue of
(Psi Phi)^T (Psi Phi), estimated by power iteration from a fixed start
vector and inflated by 1 % so the step never overshoots.
With ``lambda_reg="auto"``: lam = 0.01 * ||(Psi Phi)^T b||_inf.
With ``box=True`` every iterate is projected onto images with pixels in
[0, 1] before the momentum step.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.analysis.classical.base import ClassicalReconstructor
from src.analysis.classical.transforms import dct2, idct2, soft_threshold
from src.core.rng import derive_stream_id, rng_substream, sample_gaussian_array
from src.simulation.patterns import PatternSet, sensing_matrix
from src.utils.errors import DomainError, NumericError, ShapeError

AUTO_LAMBDA_SCALE = 0.01
LIPSCHITZ_MARGIN = 1.01


class FistaConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    iterations: int = Field(200, ge=1)
    lambda_reg: float | Literal["auto"] = "auto"
    basis: Literal["dct"] = "dct"
    power_iterations: int = Field(100, ge=50)
    box: bool = True

    def resolved_lambda(self, correlation_inf: float) -> float:
        if self.lambda_reg == "auto":
            return AUTO_LAMBDA_SCALE * correlation_inf
        if self.lambda_reg < 0:
            raise DomainError(f"lambda_reg must be >= 0, got {self.lambda_reg}")
        return float(self.lambda_reg)


@dataclass
class FistaResult:
    image: np.ndarray
    raw: np.ndarray
    coefficients: np.ndarray
    lipschitz: float
    lam: float
    iterations: int
    objective: list[float] = field(default_factory=list)
    best_objective: list[float] = field(default_factory=list)
    residual: list[float] = field(default_factory=list)
    runtime_ms: float = 0.0

    def metadata(self) -> dict:
        return {
            "iterations": self.iterations,
            "lambda": self.lam,
            "lipschitz": self.lipschitz,
            "runtime_ms": self.runtime_ms,
            "final_objective": self.objective[-1] if self.objective else None,
        }


class _DctOperator:
    """B a = Psi idct2(a);  B^T r = dct2(Psi^T r)."""

    def __init__(self, Psi: np.ndarray, H: int, W: int):
        self.Psi = Psi
        self.H, self.W = H, W

    def forward(self, a: np.ndarray) -> np.ndarray:
        return self.Psi @ idct2(a.reshape(self.H, self.W)).reshape(-1)

    def adjoint(self, r: np.ndarray) -> np.ndarray:
        return dct2((self.Psi.T @ r).reshape(self.H, self.W)).reshape(-1)


def estimate_lipschitz(op: _DctOperator, iterations: int) -> float:
    rng = rng_substream(0, derive_stream_id("fista", "power_iteration"))
    v = sample_gaussian_array(rng, 0.0, 1.0, op.H * op.W)
    v /= np.linalg.norm(v)
    eigen = 0.0
    for _ in range(iterations):
        w = op.adjoint(op.forward(v))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        eigen = float(v @ w)
        v = w / norm
    if not eigen > 0.0 or not math.isfinite(eigen):
        raise NumericError("Lipschitz estimate failed: sensing operator is zero on the probe", parameter="L_lip")
    return LIPSCHITZ_MARGIN * eigen


def project_box(a: np.ndarray, H: int, W: int) -> np.ndarray:
    """DCT coefficients of the image clipped to [0, 1]."""
    return dct2(np.clip(idct2(a.reshape(H, W)), 0.0, 1.0)).reshape(-1)


def fista_solve(
    ps: PatternSet,
    b: np.ndarray,
    cfg: FistaConfig | None = None,
    keep: np.ndarray | None = None,
) -> FistaResult:
    cfg = cfg or FistaConfig()
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.size != ps.M:
        raise ShapeError(f"expected {ps.M} buckets, got {b.size}")
    Psi = sensing_matrix(ps)
    if keep is not None:
        Psi, b = Psi[keep], b[keep]

    start = time.perf_counter()
    op = _DctOperator(Psi, ps.H, ps.W)
    L = estimate_lipschitz(op, cfg.power_iterations)
    lam = cfg.resolved_lambda(float(np.max(np.abs(op.adjoint(b)))) if b.size else 0.0)

    a = np.zeros(ps.H * ps.W)
    y = a.copy()
    t = 1.0
    objective, best, residual = [], [], []
    best_value = math.inf
    for _ in range(cfg.iterations):
        gradient = op.adjoint(op.forward(y) - b)
        a_next = soft_threshold(y - gradient / L, lam / L)
        if cfg.box:
            a_next = project_box(a_next, ps.H, ps.W)
        t_next = (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0
        y = a_next + ((t - 1.0) / t_next) * (a_next - a)
        a, t = a_next, t_next

        r = op.forward(a) - b
        res = float(r @ r)
        value = 0.5 * res + lam * float(np.abs(a).sum())
        if not math.isfinite(value):
            raise NumericError("FISTA objective became non-finite", parameter="alpha")
        best_value = min(best_value, value)
        residual.append(res)
        objective.append(value)
        best.append(best_value)

    raw = idct2(a.reshape(ps.H, ps.W))
    return FistaResult(
        image=np.clip(raw, 0.0, 1.0),
        raw=raw,
        coefficients=a.reshape(ps.H, ps.W),
        lipschitz=L,
        lam=lam,
        iterations=cfg.iterations,
        objective=objective,
        best_objective=best,
        residual=residual,
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )


def fista(ps: PatternSet, b: np.ndarray, cfg: FistaConfig | None = None) -> np.ndarray:
    """Clamped FISTA reconstruction, shape [H, W]."""
    return fista_solve(ps, b, cfg).image


class FISTAReconstructor(ClassicalReconstructor):
    name = "fista"

    def __init__(self, patterns: PatternSet, config: FistaConfig | None = None):
        super().__init__(patterns)
        self.config = config or FistaConfig()
        self.last_results: list[FistaResult] = []

    def reconstruct(self, intensities, mask=None):
        self.last_results = []
        return super().reconstruct(intensities, mask)

    def solve_frame(self, b, keep=None):
        result = fista_solve(self.patterns, b, self.config, keep)
        self.last_results.append(result)
        self.logger.debug(f"lam={result.lam:.3g} L={result.lipschitz:.3g} objective={result.objective[-1]:.4g}")
        return result.raw

    def get_metadata_dict(self) -> dict:
        return {
            **super().get_metadata_dict(),
            "config": self.config.model_dump(),
            "lambda_rule": f"{AUTO_LAMBDA_SCALE} * ||(Psi Phi)^T b||_inf",
            "frames": [r.metadata() for r in self.last_results],
        }
