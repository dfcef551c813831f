from src.simulation.measurement import (
    BucketSeries,
    classical_detect,
    drop_measurements,
    ideal_intensity,
    sigma_for_snr,
)
from src.simulation.patterns import (
    PatternSet,
    binarize,
    generate_bernoulli,
    generate_speckle,
    sampling_ratio,
    sensing_matrix,
)
from src.simulation.qdetector import DetectorSpec, apply_dead_time, detect_counts, preset, signal_to_dark_ratio
from src.simulation.scene import (
    MotionSpec,
    SceneSequence,
    generate_sprite,
    generate_trajectory,
    render_sequence,
)

__all__ = [
    "BucketSeries",
    "DetectorSpec",
    "MotionSpec",
    "PatternSet",
    "SceneSequence",
    "apply_dead_time",
    "binarize",
    "classical_detect",
    "detect_counts",
    "drop_measurements",
    "generate_bernoulli",
    "generate_speckle",
    "generate_sprite",
    "generate_trajectory",
    "ideal_intensity",
    "preset",
    "render_sequence",
    "sampling_ratio",
    "sensing_matrix",
    "sigma_for_snr",
    "signal_to_dark_ratio",
]
