"""Autoregressive rollout with boundary nodes forced to ground truth."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from typing import Literal, Protocol

import numpy as np

from ..exceptions import HorizonExceededError, ShapeMismatchError
from ..graphcore.graph import NodeType
from ..graphcore.trajectory import Trajectory
from ..models.constants import DEFAULT_FORCED_NODE_TYPES

logger = logging.getLogger("mesh-transformer.rollout")

TargetKind = Literal["delta", "absolute"]


class StepModel(Protocol):
    """Anything that predicts the next dynamic fields of a trajectory frame."""

    @property
    def target_kind(self) -> TargetKind: ...

    def predict(
        self,
        traj: Trajectory,
        state: np.ndarray,
        prev_state: np.ndarray | None = None,
        t: int | None = None,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """N×F_dyn delta or absolute next value, in physical units."""
        ...


def apply_prediction(
    current_dynamic: np.ndarray, prediction: np.ndarray, mode: TargetKind
) -> np.ndarray:
    """Absolute predictions replace the dynamic fields; deltas are added to them."""
    if prediction.shape != current_dynamic.shape:
        raise ShapeMismatchError(
            f"Model predicted {prediction.shape}, expected {current_dynamic.shape}"
        )
    if mode == "absolute":
        return np.asarray(prediction, dtype=np.float64)
    return current_dynamic + prediction


def free_nodes(traj: Trajectory, forced_node_types: Iterable[str | NodeType]) -> np.ndarray:
    """Nodes whose dynamic fields come from the model rather than ground truth."""
    types = [t if isinstance(t, NodeType) else NodeType.from_name(t) for t in forced_node_types]
    forced = traj.graph.nodes_of_type(*types)
    keep = np.ones(traj.num_nodes, dtype=bool)
    keep[forced] = False
    return np.flatnonzero(keep)


def advance(
    model: StepModel,
    traj: Trajectory,
    state: np.ndarray,
    prev_state: np.ndarray | None,
    t: int,
    free: np.ndarray,
    mode: TargetKind,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Frame t+1 predicted from ``state`` at frame t.

    Static fields and the dynamic fields of forced nodes are copied from the
    ground truth at t+1.
    """
    dyn = traj.dynamic_columns
    prediction = model.predict(traj, state, prev_state, t, rng)
    predicted = apply_prediction(state[:, dyn], np.asarray(prediction), mode)
    next_state = np.array(traj.fields[t + 1], dtype=np.float64, copy=True)
    next_state[np.ix_(free, dyn)] = predicted[free]
    return next_state


def rollout(
    model: StepModel,
    traj: Trajectory,
    start_t: int = 0,
    steps: int | None = None,
    mode: TargetKind | None = None,
    forced_node_types: Iterable[str | NodeType] = DEFAULT_FORCED_NODE_TYPES,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Roll a model forward from frame ``start_t``.

    Args:
        model: Step model
        traj: Ground-truth trajectory supplying the start frame and boundaries
        start_t: Index of the start frame
        steps: Number of predicted frames (default: up to the last frame)
        mode: Delta or absolute interpretation of predictions (default: the model's)
        forced_node_types: Node types whose dynamic fields are copied from ground truth
        rng: Random-edge stream passed to the model

    Returns:
        (steps+1)×N×F array whose first frame is the ground-truth start frame

    Raises:
        HorizonExceededError: If start_t + steps passes the last frame
        ShapeMismatchError: If the model output does not match the dynamic fields
    """
    if steps is None:
        steps = traj.num_frames - 1 - start_t
    if start_t < 0 or steps < 0 or start_t + steps > traj.num_frames - 1:
        raise HorizonExceededError(
            f"Rollout from t={start_t} for {steps} steps exceeds the last frame "
            f"{traj.num_frames - 1}"
        )
    mode = mode or model.target_kind
    free = free_nodes(traj, forced_node_types)

    frames = np.empty((steps + 1, traj.num_nodes, traj.num_fields), dtype=np.float64)
    frames[0] = traj.fields[start_t]
    prev = (
        np.asarray(traj.fields[start_t - 1], dtype=np.float64)
        if (traj.history_depth == 1 and start_t > 0)
        else None
    )
    for step in range(steps):
        t = start_t + step
        frames[step + 1] = advance(model, traj, frames[step], prev, t, free, mode, rng)
        prev = frames[step]
    logger.debug(f"Rolled out {steps} steps from t={start_t}")
    return frames
