"""Autoregressive rollout and trajectory metrics."""

from ..graphcore.trajectory import Trajectory
from .baselines import PersistenceModel
from .engine import StepModel, TargetKind, advance, apply_prediction, free_nodes, rollout
from .metrics import all_rollout_metric, evaluate, one_step_metric

__all__ = [
    "PersistenceModel",
    "StepModel",
    "TargetKind",
    "Trajectory",
    "advance",
    "all_rollout_metric",
    "apply_prediction",
    "evaluate",
    "free_nodes",
    "one_step_metric",
    "rollout",
]
