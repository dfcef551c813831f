"""
Dynamic ground-truth scenes: procedural sprites moved along one of six
trajectory families and composited with bilinear sub-pixel placement.

Positions are ``(x, y)`` pairs, ``x`` along the width (columns) and ``y``
along the height (rows). Bounds are given as ``(H, W)``.

Trajectory parameterisations (amplitude, period, radius, acceleration) are
documented defaults of :class:`MotionSpec`, not measured values.
"""

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator

from src.core.rng import RngStream, rng_substream, derive_stream_id, sample_gaussian
from src.utils.errors import DomainError, ShapeError

MotionKind = Literal["linear", "oscillatory", "circular", "accelerating", "random_walk", "bounce"]
SpriteKind = Literal["disc", "ring", "rect", "glyph"]

MOTION_KINDS: tuple[str, ...] = ("linear", "oscillatory", "circular", "accelerating", "random_walk", "bounce")
SPRITE_KINDS: tuple[str, ...] = ("disc", "ring", "rect", "glyph")


class MotionSpec(BaseModel):
    """
    Motion of a single sprite.

    ``speed`` is px/frame: step length for linear/circular/bounce, peak speed
    for oscillatory, initial speed for accelerating and the RMS step length
    for random_walk.
    """

    kind: MotionKind = "linear"
    speed: float = Field(1.0, ge=0.0, le=50.0)
    direction: tuple[float, float] = (1.0, 0.0)
    amplitude: float | None = Field(None, gt=0.0, description="oscillatory amplitude in px; derived from speed and period when unset")
    period: float = Field(8.0, gt=0.0, description="oscillatory period in frames")
    radius: float = Field(4.0, gt=0.0, description="circular radius in px")
    phase: float = Field(0.0, description="starting angle in radians (circular)")
    acceleration: float = Field(0.5, ge=0.0, description="accelerating: step growth in px/frame^2")
    seed: int = Field(0, ge=0, description="seed for random_walk steps")

    @field_validator("direction")
    @classmethod
    def _unit_direction(cls, value):
        norm = math.hypot(value[0], value[1])
        if norm == 0.0:
            raise ValueError("direction must be a non-zero vector")
        return (value[0] / norm, value[1] / norm)


@dataclass
class SceneSequence:
    """T frames of H x W pixels in [0, 1], with optional motion metadata."""

    frames: np.ndarray
    motion: MotionSpec | None = None
    centers: np.ndarray | None = None
    sprite_kind: str | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3 or frames.shape[0] < 1:
            raise ShapeError(f"frames must have shape [T, H, W] with T >= 1, got {frames.shape}")
        if not np.all(np.isfinite(frames)) or frames.min() < 0.0 or frames.max() > 1.0:
            raise DomainError("scene pixels must lie in [0, 1]")
        self.frames = frames
        if self.centers is not None:
            self.centers = np.asarray(self.centers, dtype=np.float64).reshape(frames.shape[0], 2)

    @property
    def T(self) -> int:
        return self.frames.shape[0]

    @property
    def H(self) -> int:
        return self.frames.shape[1]

    @property
    def W(self) -> int:
        return self.frames.shape[2]


# ---------------------------------------------------------------- sprites

# seven-segment layout: (row0, col0, row1, col1) in units of a 2x1 cell box
_SEGMENTS = {
    "a": (0.0, 0.0, 0.0, 1.0),
    "b": (0.0, 1.0, 1.0, 1.0),
    "c": (1.0, 1.0, 2.0, 1.0),
    "d": (2.0, 0.0, 2.0, 1.0),
    "e": (1.0, 0.0, 2.0, 0.0),
    "f": (0.0, 0.0, 1.0, 0.0),
    "g": (1.0, 0.0, 1.0, 1.0),
}
_DIGITS = {
    0: "abcdef", 1: "bc", 2: "abged", 3: "abgcd", 4: "fgbc",
    5: "afgcd", 6: "afgedc", 7: "abc", 8: "abcdefg", 9: "abcdfg",
}


def _sprite_extent(kind: str, size_px: float) -> tuple[int, int]:
    if kind in ("disc", "ring"):
        side = 2 * math.ceil(size_px) + 1
        return side, side
    if kind == "rect":
        side = int(round(size_px))
        return side, side
    height = int(round(size_px))
    return height, max(3, int(round(0.6 * size_px)))


def generate_sprite(kind: SpriteKind, size_px: float, rng: RngStream, shape: tuple[int, int] = (16, 16)) -> np.ndarray:
    """
    Grayscale sprite centred in an ``shape`` canvas, background 0.

    ``size_px`` is the radius for disc/ring, the side for rect and the glyph
    height for glyph. Glyphs are seven-segment digits picked with ``rng``.
    """
    if kind not in SPRITE_KINDS:
        raise DomainError(f"Unknown sprite kind '{kind}'. Available: {', '.join(SPRITE_KINDS)}")
    if size_px <= 0:
        raise DomainError(f"sprite size must be positive, got {size_px}")
    H, W = shape
    height, width = _sprite_extent(kind, size_px)
    if height > H or width > W or height < 1:
        raise DomainError(f"{kind} sprite of size {size_px} px does not fit a {H}x{W} frame")

    rows, cols = np.mgrid[0:H, 0:W].astype(np.float64)
    cy, cx = (H - 1) / 2.0, (W - 1) / 2.0
    image = np.zeros((H, W), dtype=np.float64)

    if kind == "disc":
        image[np.hypot(rows - cy, cols - cx) <= size_px] = 1.0
    elif kind == "ring":
        dist = np.hypot(rows - cy, cols - cx)
        thickness = max(1.0, size_px / 3.0)
        image[(dist <= size_px) & (dist > size_px - thickness)] = 1.0
    elif kind == "rect":
        top, left = (H - height) // 2, (W - width) // 2
        image[top:top + height, left:left + width] = 1.0
    else:
        digit = min(9, int(rng.uniform() * 10))
        top, left = (H - height) // 2, (W - width) // 2
        stroke = max(1, int(round(height / 7)))
        cell_h = (height - stroke) / 2.0
        cell_w = width - stroke
        for name in _DIGITS[digit]:
            r0, c0, r1, c1 = _SEGMENTS[name]
            y0 = top + int(round(r0 * cell_h))
            y1 = top + int(round(r1 * cell_h)) + stroke
            x0 = left + int(round(c0 * cell_w))
            x1 = left + int(round(c1 * cell_w)) + stroke
            image[y0:y1, x0:x1] = 1.0
    return image


# ----------------------------------------------------------- trajectories

def _clamp(p: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(p, lo), hi)


def _reflect(p: np.ndarray, v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = p.copy()
    v = v.copy()
    for axis in range(2):
        span = hi[axis] - lo[axis]
        if span <= 0:
            p[axis] = lo[axis]
            continue
        # fold repeatedly for steps longer than the box
        while p[axis] > hi[axis] or p[axis] < lo[axis]:
            if p[axis] > hi[axis]:
                p[axis] = 2 * hi[axis] - p[axis]
            else:
                p[axis] = 2 * lo[axis] - p[axis]
            v[axis] = -v[axis]
    return p, v


def generate_trajectory(
    spec: MotionSpec,
    T: int,
    start: tuple[float, float],
    bounds: tuple[int, int],
    margin: float = 0.0,
) -> list[tuple[float, float]]:
    """
    ``T`` positions starting at ``start``.

    Positions are kept inside ``[margin, W-1-margin] x [margin, H-1-margin]``:
    bounce reflects at that box, every other kind clamps to it.
    """
    if T < 1:
        raise DomainError(f"trajectory length must be >= 1, got {T}")
    if spec.speed < 0:
        raise DomainError(f"speed must be >= 0, got {spec.speed}")
    H, W = bounds
    lo = np.array([margin, margin], dtype=np.float64)
    hi = np.array([W - 1 - margin, H - 1 - margin], dtype=np.float64)
    hi = np.maximum(hi, lo)
    p0 = np.array(start, dtype=np.float64)
    if not (0.0 <= p0[0] <= W - 1 and 0.0 <= p0[1] <= H - 1):
        raise DomainError(f"start {start} lies outside a {H}x{W} frame")

    direction = np.array(spec.direction, dtype=np.float64)
    positions = [p0.copy()]

    if spec.kind == "linear":
        p = p0.copy()
        for _ in range(1, T):
            p = _clamp(p + spec.speed * direction, lo, hi)
            positions.append(p)

    elif spec.kind == "bounce":
        p, v = p0.copy(), spec.speed * direction
        for _ in range(1, T):
            p, v = _reflect(p + v, v, lo, hi)
            positions.append(p)

    elif spec.kind == "oscillatory":
        omega = 2.0 * math.pi / spec.period
        amplitude = spec.amplitude if spec.amplitude is not None else spec.speed / omega
        for t in range(1, T):
            offset = amplitude * math.sin(omega * t) * direction
            positions.append(_clamp(p0 + offset, lo, hi))

    elif spec.kind == "circular":
        radius = max(spec.radius, spec.speed / 2.0)
        # chord per frame equals speed
        omega = 2.0 * math.asin(min(1.0, spec.speed / (2.0 * radius))) if spec.speed > 0 else 0.0
        center = p0 - radius * np.array([math.cos(spec.phase), math.sin(spec.phase)])
        for t in range(1, T):
            angle = spec.phase + omega * t
            p = center + radius * np.array([math.cos(angle), math.sin(angle)])
            positions.append(_clamp(p, lo, hi))

    elif spec.kind == "accelerating":
        p = p0.copy()
        for t in range(1, T):
            step = spec.speed + spec.acceleration * (t - 1)
            p = _clamp(p + step * direction, lo, hi)
            positions.append(p)

    elif spec.kind == "random_walk":
        rng = rng_substream(spec.seed, derive_stream_id("random_walk"))
        sigma = spec.speed / math.sqrt(2.0)
        p = p0.copy()
        for _ in range(1, T):
            step = np.array([sample_gaussian(rng, 0.0, sigma), sample_gaussian(rng, 0.0, sigma)])
            p = _clamp(p + step, lo, hi)
            positions.append(p)

    return [(float(q[0]), float(q[1])) for q in positions]


# --------------------------------------------------------------- rendering

def _place(sprite: np.ndarray, dy: int, dx: int, H: int, W: int) -> np.ndarray:
    """Integer shift of ``sprite`` onto an H x W canvas; pixels leaving the canvas are dropped."""
    canvas = np.zeros((H, W), dtype=np.float64)
    h, w = sprite.shape
    r0, r1 = max(0, dy), min(H, dy + h)
    c0, c1 = max(0, dx), min(W, dx + w)
    if r0 >= r1 or c0 >= c1:
        return canvas
    canvas[r0:r1, c0:c1] = sprite[r0 - dy:r1 - dy, c0 - dx:c1 - dx]
    return canvas


def composite(sprite: np.ndarray, position: tuple[float, float], H: int, W: int) -> np.ndarray:
    """Place the sprite centre at ``position`` with bilinear sub-pixel weights."""
    h, w = sprite.shape
    ox = position[0] - (w - 1) / 2.0
    oy = position[1] - (h - 1) / 2.0
    ix, iy = math.floor(ox), math.floor(oy)
    fx, fy = ox - ix, oy - iy
    frame = (1 - fx) * (1 - fy) * _place(sprite, iy, ix, H, W)
    if fx > 0:
        frame += fx * (1 - fy) * _place(sprite, iy, ix + 1, H, W)
    if fy > 0:
        frame += (1 - fx) * fy * _place(sprite, iy + 1, ix, H, W)
    if fx > 0 and fy > 0:
        frame += fx * fy * _place(sprite, iy + 1, ix + 1, H, W)
    return np.clip(frame, 0.0, 1.0)


def render_sequence(
    sprite: np.ndarray,
    traj: list[tuple[float, float]],
    H: int,
    W: int,
    motion: MotionSpec | None = None,
    sprite_kind: str | None = None,
) -> SceneSequence:
    """Frame t is ``sprite`` composited at ``traj[t]``."""
    if len(traj) < 1:
        raise DomainError("trajectory must contain at least one position")
    sprite = np.asarray(sprite, dtype=np.float64)
    frames = np.stack([composite(sprite, p, H, W) for p in traj])
    return SceneSequence(frames=frames, motion=motion, centers=np.array(traj), sprite_kind=sprite_kind)


def sprite_margin(kind: str, size_px: float) -> float:
    """Distance from the sprite centre to its farthest lit pixel along an axis."""
    height, width = _sprite_extent(kind, size_px)
    return (max(height, width) - 1) / 2.0


def random_scene(
    master_seed: int,
    index: int,
    T: int,
    shape: tuple[int, int],
    sprite_kind: str,
    sprite_size: float,
    motion_kind: str,
    speed: float,
    motion_overrides: dict | None = None,
) -> SceneSequence:
    """One benchmark sequence; everything is drawn from the ``("scene", index)`` substream."""
    H, W = shape
    rng = rng_substream(master_seed, derive_stream_id("scene", index))
    sprite = generate_sprite(sprite_kind, sprite_size, rng, shape=shape)
    margin = min(sprite_margin(sprite_kind, sprite_size), (min(H, W) - 1) / 2.0)
    start = (
        margin + rng.uniform() * max(0.0, W - 1 - 2 * margin),
        margin + rng.uniform() * max(0.0, H - 1 - 2 * margin),
    )
    angle = 2.0 * math.pi * rng.uniform()
    spec = MotionSpec(
        kind=motion_kind,
        speed=speed,
        direction=(math.cos(angle), math.sin(angle)),
        phase=angle,
        seed=derive_stream_id("walk", master_seed, index) & 0x7FFFFFFF,
        **(motion_overrides or {}),
    )
    traj = generate_trajectory(spec, T, start, (H, W), margin=margin)
    return render_sequence(sprite, traj, H, W, motion=spec, sprite_kind=sprite_kind)
