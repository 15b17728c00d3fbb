"""One-step and all-rollout error metrics."""

import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np

from ..exceptions import TrajectoryTooShortError
from ..graphcore.graph import NodeType
from ..graphcore.trajectory import Trajectory
from ..models.constants import DEFAULT_FORCED_NODE_TYPES
from ..models.records import EvalReport, MetricValues, TrajectoryMetrics
from .baselines import PersistenceModel
from .engine import StepModel, advance, free_nodes, rollout

logger = logging.getLogger("mesh-transformer.rollout")


def _check_length(traj: Trajectory) -> int:
    if traj.num_frames < 2:
        raise TrajectoryTooShortError(
            f"Metrics need at least 2 frames, trajectory has {traj.num_frames}"
        )
    return traj.num_frames - 1


def _squared_error(truth: np.ndarray, predicted: np.ndarray, dyn: np.ndarray) -> float:
    diff = truth[..., dyn] - predicted[..., dyn]
    return float(np.sum(diff * diff))


def one_step_metric(
    model: StepModel,
    traj: Trajectory,
    forced_node_types: Iterable[str | NodeType] = DEFAULT_FORCED_NODE_TYPES,
    root: bool = False,
    rng: np.random.Generator | None = None,
) -> float:
    """
    (1/TN)·Σ_t Σ_i ‖G_t − f(G_{t−1})‖² over the dynamic fields, T = frames − 1.

    ``rng`` draws the random attention edges of every predicted step.

    Raises:
        TrajectoryTooShortError: If the trajectory has fewer than 2 frames
    """
    steps = _check_length(traj)
    free = free_nodes(traj, forced_node_types)
    dyn = traj.dynamic_columns
    total = 0.0
    for t in range(1, steps + 1):
        prev = traj.fields[t - 2] if (traj.history_depth == 1 and t > 1) else None
        predicted = advance(
            model, traj, traj.fields[t - 1], prev, t - 1, free, model.target_kind, rng
        )
        total += _squared_error(traj.fields[t], predicted, dyn)
    value = total / (steps * traj.num_nodes)
    return math.sqrt(value) if root else value


def all_rollout_metric(
    model: StepModel,
    traj: Trajectory,
    forced_node_types: Iterable[str | NodeType] = DEFAULT_FORCED_NODE_TYPES,
    root: bool = False,
    rng: np.random.Generator | None = None,
) -> float:
    """
    (1/TN)·Σ_t Σ_i ‖G_t − f∘…∘f(G_0)‖² from a single rollout starting at t=0.

    Raises:
        TrajectoryTooShortError: If the trajectory has fewer than 2 frames
    """
    steps = _check_length(traj)
    frames = rollout(model, traj, 0, steps, forced_node_types=forced_node_types, rng=rng)
    value = _squared_error(traj.fields[1:], frames[1:], traj.dynamic_columns) / (
        steps * traj.num_nodes
    )
    return math.sqrt(value) if root else value


def evaluate(
    model: StepModel,
    trajectories: Sequence[Trajectory],
    names: Sequence[str] | None = None,
    forced_node_types: Iterable[str | NodeType] = DEFAULT_FORCED_NODE_TYPES,
    root: bool = False,
    with_persistence: bool = True,
    seed: int = 0,
) -> EvalReport:
    """
    Metrics of every trajectory, their mean, and optionally the persistence baseline.

    Random attention edges are redrawn at every predicted step from one
    generator seeded with ``seed``.
    """
    forced = tuple(forced_node_types)
    rng = np.random.default_rng(seed)
    names = list(names) if names is not None else [f"traj-{i}" for i in range(len(trajectories))]
    rows = []
    for name, traj in zip(names, trajectories, strict=True):
        one_step = one_step_metric(model, traj, forced, root, rng)
        all_rollout = all_rollout_metric(model, traj, forced, root, rng)
        scaled = MetricValues.scaled(one_step, all_rollout)
        rows.append(TrajectoryMetrics(name=name, **scaled.model_dump()))
        logger.info(f"{name}: 1-step={one_step:.6g} all-rollout={all_rollout:.6g}")

    persistence = None
    if with_persistence:
        baseline = PersistenceModel()
        persistence = MetricValues.scaled(
            float(np.mean([one_step_metric(baseline, t, forced, root) for t in trajectories])),
            float(np.mean([all_rollout_metric(baseline, t, forced, root) for t in trajectories])),
        )
    return EvalReport.from_trajectories(rows, persistence=persistence, root=root)
