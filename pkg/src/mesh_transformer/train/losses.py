"""Loss functions."""

import numpy as np

from ..exceptions import ShapeMismatchError


def l2_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """
    Mean over all N·p_out entries of the squared error.

    Raises:
        ShapeMismatchError: If the shapes differ
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"l2_loss: prediction {pred.shape} vs target {target.shape}")
    if pred.size == 0:
        return 0.0
    diff = pred - target
    return float(np.mean(diff * diff))
