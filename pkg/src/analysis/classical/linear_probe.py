"""
Ridge-regression probe: normalised bucket vector of one frame -> flattened
frame. Fitted in closed form on a training split; used to compare input
normalizations without training the transformer.
"""

import numpy as np
from sklearn.linear_model import Ridge

from src.utils.errors import DomainError, ShapeError
from src.utils.logger import get_logger


class LinearProbeReconstructor:
    name = "linear_probe"

    def __init__(self, alpha: float = 1e-2):
        if alpha < 0:
            raise DomainError(f"ridge alpha must be >= 0, got {alpha}")
        self.alpha = alpha
        self.model: Ridge | None = None
        self.frame_shape: tuple[int, int] | None = None
        self.logger = get_logger("LinearProbeReconstructor")

    def fit(self, inputs: list[np.ndarray], truths: list[np.ndarray]) -> "LinearProbeReconstructor":
        """``inputs`` are [T, M] arrays, ``truths`` the matching [T, H, W] frames."""
        if not inputs:
            raise DomainError("linear probe needs at least one training sequence")
        X = np.concatenate([np.asarray(b, dtype=np.float64) for b in inputs], axis=0)
        frames = np.concatenate([np.asarray(x, dtype=np.float64) for x in truths], axis=0)
        if X.shape[0] != frames.shape[0]:
            raise ShapeError(f"{X.shape[0]} bucket rows but {frames.shape[0]} frames")
        self.frame_shape = frames.shape[1:]
        self.model = Ridge(alpha=self.alpha).fit(X, frames.reshape(frames.shape[0], -1))
        self.logger.info(f"Fitted on {X.shape[0]} frames, {X.shape[1]} features")
        return self

    def reconstruct(self, inputs: np.ndarray) -> np.ndarray:
        if self.model is None:
            raise ValueError("Run fit() first")
        pred = self.model.predict(np.asarray(inputs, dtype=np.float64))
        return np.clip(pred.reshape(-1, *self.frame_shape), 0.0, 1.0)
