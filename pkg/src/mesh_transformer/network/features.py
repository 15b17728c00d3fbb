"""Node feature layout fed to the encoder."""

import numpy as np

from ..exceptions import ShapeMismatchError
from ..graphcore.graph import NUM_NODE_TYPES
from ..graphcore.trajectory import Trajectory


def feature_width(num_fields: int, num_dynamic: int, history_depth: int) -> int:
    """p_in: all fields, dynamic history differences, node-type one-hot."""
    return num_fields + (num_dynamic if history_depth == 1 else 0) + NUM_NODE_TYPES


def node_type_one_hot(node_type: np.ndarray) -> np.ndarray:
    one_hot = np.zeros((node_type.shape[0], NUM_NODE_TYPES), dtype=np.float64)
    one_hot[np.arange(node_type.shape[0]), node_type] = 1.0
    return one_hot


def build_inputs(
    traj: Trajectory,
    state: np.ndarray,
    prev_state: np.ndarray | None = None,
) -> np.ndarray:
    """
    Feature matrix of one frame.

    Args:
        traj: Trajectory providing the graph and field layout
        state: N×F fields of the current frame (possibly noisy or predicted)
        prev_state: N×F fields of the previous frame; history differences are
            zero when it is omitted

    Returns:
        N×p_in array: [fields] ⊕ [dynamic history differences] ⊕ [node type one-hot]
    """
    if state.shape != (traj.num_nodes, traj.num_fields):
        raise ShapeMismatchError(
            f"State of shape {state.shape} does not match N×F=({traj.num_nodes}, {traj.num_fields})"
        )
    parts = [np.asarray(state, dtype=np.float64)]
    if traj.history_depth == 1:
        dyn = traj.dynamic_columns
        if prev_state is None:
            parts.append(np.zeros((traj.num_nodes, dyn.shape[0])))
        else:
            parts.append(state[:, dyn] - prev_state[:, dyn])
    parts.append(node_type_one_hot(traj.graph.node_type))
    return np.concatenate(parts, axis=1)


def history_inputs(traj: Trajectory, t: int) -> tuple[np.ndarray, np.ndarray | None]:
    """Ground-truth (state, previous state) at frame ``t``."""
    prev = traj.fields[t - 1] if (traj.history_depth == 1 and t > 0) else None
    return traj.fields[t], prev
