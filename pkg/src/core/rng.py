"""
Deterministic random streams and the samplers built on them.

Substreams are derived counter-style: ``(master_seed, stream_id)`` goes
through numpy's ``SeedSequence`` mixing hash and keys a Philox counter
generator, so two ids never share state and no call order matters.

All samplers read uniforms from the stream one at a time, in the order they
are documented below, so a draw sequence is a pure function of the stream
state and the arguments.

Poisson: Knuth's product method for ``lam < 30``; Hoermann's transformed
rejection (PTRS) for ``lam >= 30``. The seam is fixed at 30.
"""

import hashlib
import math

import numpy as np

from src.utils.errors import DomainError

POISSON_SEAM = 30.0
_U64 = (1 << 64) - 1
_BLOCK = 4096


class RngStream:
    """Single-owner uniform stream keyed by ``(master_seed, stream_id)``."""

    def __init__(self, master_seed: int, stream_id: int):
        self.master_seed = int(master_seed) & _U64
        self.stream_id = int(stream_id) & _U64
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        self._generator = np.random.Generator(np.random.Philox(seq))
        self._block: list[float] = []
        self._pos = 0
        self.draws = 0

    def _refill(self) -> None:
        # 1 - [0,1) gives (0,1]: safe for log() and for products
        self._block = (1.0 - self._generator.random(_BLOCK)).tolist()
        self._pos = 0

    def uniform(self) -> float:
        """Next uniform in (0, 1]."""
        if self._pos >= len(self._block):
            self._refill()
        value = self._block[self._pos]
        self._pos += 1
        self.draws += 1
        return value

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` uniforms; identical to ``n`` successive ``uniform()`` calls."""
        out = np.empty(int(n), dtype=np.float64)
        filled = 0
        while filled < n:
            if self._pos >= len(self._block):
                self._refill()
            take = min(n - filled, len(self._block) - self._pos)
            out[filled:filled + take] = self._block[self._pos:self._pos + take]
            self._pos += take
            filled += take
        self.draws += int(n)
        return out

    def numpy_generator(self) -> np.random.Generator:
        """Underlying generator, for bulk draws that have no sequential contract."""
        return self._generator

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}, draws={self.draws})"


def rng_substream(master_seed: int, stream_id: int) -> RngStream:
    """Stream whose state is the SeedSequence mix of both inputs."""
    return RngStream(master_seed, stream_id)


def derive_stream_id(*labels) -> int:
    """Stable 64-bit stream id from a tuple of labels (``"detector", 3``)."""
    text = ":".join(str(label) for label in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big", signed=False)


def _check_rate(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise DomainError(f"Poisson rate must be finite and >= 0, got {lam}")
    return lam


def _poisson_knuth(rng: RngStream, lam: float) -> int:
    limit = math.exp(-lam)
    k = 0
    p = rng.uniform()
    while p > limit:
        k += 1
        p *= rng.uniform()
    return k


def _poisson_ptrs(rng: RngStream, lam: float) -> int:
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2)
    while True:
        u = rng.uniform() - 0.5
        v = rng.uniform()
        us = 0.5 - abs(u)
        if us <= 0.0:
            continue
        k = math.floor((2 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1)):
            return int(k)


def sample_poisson(rng: RngStream, lam: float) -> int:
    """One Poisson(lam) count. ``lam == 0`` returns 0 without drawing."""
    lam = _check_rate(lam)
    if lam == 0.0:
        return 0
    if lam < POISSON_SEAM:
        return _poisson_knuth(rng, lam)
    return _poisson_ptrs(rng, lam)


def sample_poisson_array(rng: RngStream, lam, size: int | None = None) -> np.ndarray:
    """Row-major sequence of Poisson draws, one per element of ``lam`` (or ``size`` draws of a scalar)."""
    rates = np.asarray(lam, dtype=np.float64)
    if size is not None:
        rates = np.full(int(size), float(rates))
    flat = rates.reshape(-1)
    out = np.fromiter((sample_poisson(rng, r) for r in flat), dtype=np.int64, count=flat.size)
    return out.reshape(rates.shape)


def sample_gaussian(rng: RngStream, mean: float, sigma: float) -> float:
    """Box-Muller draw from N(mean, sigma^2); consumes two uniforms."""
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 0:
        raise DomainError(f"sigma must be finite and >= 0, got {sigma}")
    u1 = rng.uniform()
    u2 = rng.uniform()
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
    return float(mean) + sigma * z


def sample_gaussian_array(rng: RngStream, mean, sigma: float, shape) -> np.ndarray:
    """Vectorised Box-Muller; identical to repeated ``sample_gaussian`` calls in row-major order."""
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 0:
        raise DomainError(f"sigma must be finite and >= 0, got {sigma}")
    shape = tuple(int(s) for s in shape) if isinstance(shape, (tuple, list)) else (int(shape),)
    n = math.prod(shape)
    u = rng.uniforms(2 * n).reshape(n, 2)
    z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
    return np.asarray(mean, dtype=np.float64) + sigma * z.reshape(shape)


def sample_binomial(rng: RngStream, n: int, p: float) -> int:
    """Binomial(n, p) by sequential inversion; ``n == 0`` or ``p == 0`` draws nothing.

    Large means (``n*min(p, 1-p) >= 30``) go through the stream's generator (BTPE).
    """
    n = int(n)
    p = float(p)
    if n < 0:
        raise DomainError(f"binomial trials must be >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binomial probability must be in [0, 1], got {p}")
    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n
    if n * min(p, 1.0 - p) >= POISSON_SEAM:
        return int(rng.numpy_generator().binomial(n, p))

    q = 1.0 - p
    s = p / q
    a = (n + 1) * s
    r = q ** n
    u = rng.uniform()
    x = 0
    while u > r and x < n:
        u -= r
        x += 1
        r *= a / x - s
    return x
