"""
Result records written by training, evaluation, FLOPs accounting and sweeps.
"""

import math

from pydantic import Field, model_validator

from .base import SchemaModel
from .constants import METRIC_DISPLAY_SCALE


class RunRecord(SchemaModel):
    """FLOPs budget, size and outcome of one training run."""

    flop_budget: float = Field(ge=0.0)
    param_count: int = Field(ge=1)
    training_nodes: int = Field(ge=0)
    steps: int = Field(ge=0)
    final_loss: float
    final_all_rollout: float | None = None
    d: int | None = None
    layers: int | None = None
    budget_label: float | None = None

    @model_validator(mode="after")
    def _check_flops(self) -> "RunRecord":
        expected = 6.0 * self.param_count * self.training_nodes
        if expected > 0 and abs(self.flop_budget - expected) > 0.01 * expected:
            raise ValueError(
                f"flop_budget={self.flop_budget:.4g} differs from 6PD={expected:.4g} by more than 1%"
            )
        return self


class IsoFlopGroup(SchemaModel):
    """Runs sharing one FLOPs budget: (P, final_loss) pairs."""

    budget: float = Field(gt=0.0)
    runs: tuple[tuple[float, float], ...]

    @classmethod
    def from_records(
        cls, budget: float, records: list[RunRecord], tolerance: float = 0.02
    ) -> "IsoFlopGroup":
        """Group records whose realized FLOPs lie within ``tolerance`` of ``budget``."""
        runs = tuple(
            (float(r.param_count), r.final_loss)
            for r in records
            if abs(r.flop_budget - budget) <= tolerance * budget
        )
        return cls(budget=budget, runs=runs)


class IsoFlopMinimum(SchemaModel):
    budget: float
    param_count: float
    loss: float
    refined: bool = False


class PowerLawFit(SchemaModel):
    """Least-squares fit of P* = k·C^a in log space."""

    exponent: float
    coefficient: float
    residual: float
    num_points: int = Field(ge=2)

    def predict(self, budget: float) -> float:
        return self.coefficient * budget**self.exponent


class FlopsReport(SchemaModel):
    """Forward FLOPs per node under the transformer, message-passing and 2P formulas."""

    param_count: int
    transformer_per_node: float
    mps_per_node: float
    two_p: float
    ratio_transformer: float
    ratio_mps: float


class MetricValues(SchemaModel):
    one_step: float
    all_rollout: float
    one_step_x1e3: float
    all_rollout_x1e3: float

    @classmethod
    def scaled(cls, one_step: float, all_rollout: float) -> "MetricValues":
        return cls(
            one_step=one_step,
            all_rollout=all_rollout,
            one_step_x1e3=one_step * METRIC_DISPLAY_SCALE,
            all_rollout_x1e3=all_rollout * METRIC_DISPLAY_SCALE,
        )


class TrajectoryMetrics(MetricValues):
    name: str


class EvalReport(SchemaModel):
    """Per-trajectory and aggregate 1-step and all-rollout metrics."""

    root: bool = False
    trajectories: tuple[TrajectoryMetrics, ...]
    aggregate: MetricValues
    persistence: MetricValues | None = None

    @classmethod
    def from_trajectories(
        cls,
        rows: list[TrajectoryMetrics],
        persistence: MetricValues | None = None,
        root: bool = False,
    ) -> "EvalReport":
        one_step = math.fsum(r.one_step for r in rows) / len(rows)
        all_rollout = math.fsum(r.all_rollout for r in rows) / len(rows)
        return cls(
            root=root,
            trajectories=tuple(rows),
            aggregate=MetricValues.scaled(one_step, all_rollout),
            persistence=persistence,
        )


class AugmentStageStats(SchemaModel):
    stage: str
    nnz: int
    deg_max: int
    deg_mean: float


class LossMetricCorrelation(SchemaModel):
    loss_vs_metric: float
    log_flops_vs_metric: float
    num_runs: int
