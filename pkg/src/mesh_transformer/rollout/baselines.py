"""Reference step models."""

from typing import Literal

import numpy as np

from ..graphcore.trajectory import Trajectory


class PersistenceModel:
    """Always predicts a zero delta: every frame repeats the current state."""

    target_kind: Literal["delta", "absolute"] = "delta"

    def predict(
        self,
        traj: Trajectory,
        state: np.ndarray,
        prev_state: np.ndarray | None = None,
        t: int | None = None,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        return np.zeros((traj.num_nodes, traj.num_dynamic), dtype=np.float64)
