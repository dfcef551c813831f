import numpy as np
import pytest

from src.core.rng import rng_substream
from src.simulation.scene import (
    MOTION_KINDS,
    SPRITE_KINDS,
    MotionSpec,
    SceneSequence,
    composite,
    generate_sprite,
    generate_trajectory,
    random_scene,
    render_sequence,
)
from src.utils.errors import DomainError, ShapeError


def test_disc_geometry():
    disc = generate_sprite("disc", 4, rng_substream(7, 0), shape=(16, 16))
    assert disc[8, 8] == 1.0
    assert disc[0, 0] == disc[0, 15] == disc[15, 0] == disc[15, 15] == 0.0


def test_rect_has_hard_edges():
    rect = generate_sprite("rect", 6, rng_substream(7, 0), shape=(16, 16))
    assert int((rect == 1.0).sum()) == 36
    assert set(np.unique(rect)) == {0.0, 1.0}


@pytest.mark.parametrize("kind", SPRITE_KINDS)
def test_sprite_is_deterministic(kind):
    a = generate_sprite(kind, 5, rng_substream(3, 1))
    b = generate_sprite(kind, 5, rng_substream(3, 1))
    assert np.array_equal(a, b)
    assert a.max() == 1.0


def test_sprite_must_fit():
    with pytest.raises(DomainError):
        generate_sprite("disc", 9, rng_substream(7, 0), shape=(16, 16))


def test_linear_trajectory():
    spec = MotionSpec(kind="linear", speed=2, direction=(1, 0))
    assert generate_trajectory(spec, 4, (0, 0), (16, 16)) == [(0, 0), (2, 0), (4, 0), (6, 0)]


def test_bounce_reflects_at_border():
    spec = MotionSpec(kind="bounce", speed=3, direction=(1, 0))
    traj = generate_trajectory(spec, 3, (14, 5), (16, 16))
    assert traj[1] == (13.0, 5.0)
    assert traj[2][0] < traj[1][0]
    assert all(0 <= x <= 15 and 0 <= y <= 15 for x, y in traj)


def test_random_walk_is_deterministic():
    spec = MotionSpec(kind="random_walk", speed=2, seed=11)
    assert generate_trajectory(spec, 10, (8, 8), (16, 16)) == generate_trajectory(spec, 10, (8, 8), (16, 16))


def test_accelerating_steps_grow():
    spec = MotionSpec(kind="accelerating", speed=1, acceleration=0.5, direction=(0, 1))
    ys = [y for _, y in generate_trajectory(spec, 4, (5, 0), (32, 32))]
    assert np.allclose(np.diff(ys), [1.0, 1.5, 2.0])


def test_circular_chord_equals_speed():
    spec = MotionSpec(kind="circular", speed=1.5, radius=4)
    traj = np.array(generate_trajectory(spec, 5, (20, 16), (40, 40)))
    assert np.allclose(np.linalg.norm(np.diff(traj, axis=0), axis=1), 1.5)


def test_trajectory_errors():
    spec = MotionSpec()
    with pytest.raises(DomainError):
        generate_trajectory(spec, 0, (0, 0), (16, 16))
    with pytest.raises(DomainError):
        generate_trajectory(spec, 3, (20, 0), (16, 16))


def test_direction_is_normalised():
    assert MotionSpec(direction=(3, 4)).direction == pytest.approx((0.6, 0.8))


def test_stationary_sequence_repeats():
    sprite = generate_sprite("disc", 3, rng_substream(7, 0))
    seq = render_sequence(sprite, [(7.5, 7.5)] * 4, 16, 16)
    assert all(np.array_equal(seq.frames[0], f) for f in seq.frames)


def test_integer_offset_shifts_frame():
    sprite = np.zeros((5, 5))
    sprite[1:4, 1:3] = 1.0
    sprite[2, 4] = 0.5
    seq = render_sequence(sprite, [(2, 2), (4, 3)], 12, 12)
    f0, f1 = seq.frames
    assert np.array_equal(f1[1:, 2:], f0[:-1, :-2])
    assert f1[0].sum() == 0 and f1[:, :2].sum() == 0


def test_pixels_leaving_frame_are_dropped():
    sprite = np.ones((3, 3))
    frame = composite(sprite, (0, 0), 8, 8)
    assert frame.sum() == 4.0


def test_zero_sprite_gives_zero_frames():
    seq = render_sequence(np.zeros((16, 16)), [(3, 3), (9, 4)], 16, 16)
    assert not seq.frames.any()


@pytest.mark.parametrize("motion", MOTION_KINDS)
def test_random_scene_pixels_in_range(motion):
    seq = random_scene(7, 0, 6, (16, 16), "ring", 4, motion, 3.0)
    assert seq.frames.shape == (6, 16, 16)
    assert seq.frames.min() >= 0.0 and seq.frames.max() <= 1.0
    assert seq.motion.kind == motion


def test_random_scene_is_deterministic():
    a = random_scene(7, "eval-0", 4, (16, 16), "glyph", 5, "random_walk", 2.0)
    b = random_scene(7, "eval-0", 4, (16, 16), "glyph", 5, "random_walk", 2.0)
    assert np.array_equal(a.frames, b.frames)


def test_scene_validation():
    with pytest.raises(DomainError):
        SceneSequence(frames=np.full((1, 4, 4), 1.5))
    with pytest.raises(ShapeError):
        SceneSequence(frames=np.zeros((4, 4)))
