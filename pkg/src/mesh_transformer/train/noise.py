"""Training noise injection and noise-level calibration."""

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from ..exceptions import ShapeMismatchError
from ..graphcore.trajectory import NodeFeatures, Trajectory
from ..rollout.engine import StepModel, apply_prediction

logger = logging.getLogger("mesh-transformer.train")


def _generator(seed: int | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def noisy_state(
    state: np.ndarray,
    dynamic_columns: np.ndarray,
    sigmas: Sequence[float],
    seed: int | np.random.Generator,
) -> np.ndarray:
    """Copy of an N×F state with N(0, σ_f) noise on each dynamic column f."""
    sigmas_array = np.asarray(sigmas, dtype=np.float64)
    if sigmas_array.shape[0] == 0:
        return state.copy()
    if sigmas_array.shape[0] != dynamic_columns.shape[0]:
        raise ShapeMismatchError(
            f"{sigmas_array.shape[0]} noise sigmas for {dynamic_columns.shape[0]} dynamic fields"
        )
    out = state.copy()
    if np.all(sigmas_array == 0.0):
        return out
    noise = _generator(seed).standard_normal((state.shape[0], dynamic_columns.shape[0]))
    out[:, dynamic_columns] = state[:, dynamic_columns] + noise * sigmas_array
    return out


def add_noise(
    x: NodeFeatures,
    sigmas: Sequence[float],
    seed: int | np.random.Generator,
) -> NodeFeatures:
    """
    Add i.i.d. Gaussian noise to the dynamic fields; static fields stay bitwise identical.

    Raises:
        ShapeMismatchError: If len(sigmas) differs from the number of dynamic fields
    """
    return x.with_values(noisy_state(x.values, x.dynamic_columns, sigmas, seed))


def calibrate_noise(model: StepModel, trajectories: Iterable[Trajectory]) -> np.ndarray:
    """
    Per-field noise level from a model's one-step errors.

    For every dynamic field, the standard deviation of the one-step error over
    nodes is taken at each timestep, and the maximum over timesteps is returned.
    """
    worst: np.ndarray | None = None
    for traj in trajectories:
        dyn = traj.dynamic_columns
        for t in range(traj.num_frames - 1):
            prev = traj.fields[t - 1] if (traj.history_depth == 1 and t > 0) else None
            prediction = model.predict(traj, traj.fields[t], prev, t)
            next_dyn = apply_prediction(traj.fields[t][:, dyn], prediction, model.target_kind)
            spread = np.std(next_dyn - traj.fields[t + 1][:, dyn], axis=0)
            worst = spread if worst is None else np.maximum(worst, spread)
    if worst is None:
        raise ShapeMismatchError("Noise calibration needs a trajectory with two frames")
    logger.info(f"Calibrated noise sigmas: {worst.tolist()}")
    return worst
