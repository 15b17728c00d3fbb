"""
Pydantic models for configurations and result records.

This package provides type-safe, strictly validated schemas for run
configuration files and the JSON artifacts written by every command.
"""

from .base import SchemaModel
from .config import (
    AugmentSpec,
    DataPaths,
    ExponentialTail,
    GridEntry,
    ModelConfig,
    OptimizerConfig,
    PositionalEncodingSpec,
    RunConfig,
    Schedule,
    SweepSpec,
    TrainConfig,
    WarmupCosine,
    with_total_iters,
)
from .constants import MODEL_GRID, PRESETS
from .records import (
    AugmentStageStats,
    EvalReport,
    FlopsReport,
    IsoFlopGroup,
    IsoFlopMinimum,
    LossMetricCorrelation,
    MetricValues,
    PowerLawFit,
    RunRecord,
    TrajectoryMetrics,
)

__all__ = [
    # Base models
    "SchemaModel",
    # Constants
    "MODEL_GRID",
    "PRESETS",
    # Configuration
    "AugmentSpec",
    "DataPaths",
    "ExponentialTail",
    "GridEntry",
    "ModelConfig",
    "OptimizerConfig",
    "PositionalEncodingSpec",
    "RunConfig",
    "Schedule",
    "SweepSpec",
    "TrainConfig",
    "WarmupCosine",
    "with_total_iters",
    # Records
    "AugmentStageStats",
    "EvalReport",
    "FlopsReport",
    "IsoFlopGroup",
    "IsoFlopMinimum",
    "LossMetricCorrelation",
    "MetricValues",
    "PowerLawFit",
    "RunRecord",
    "TrajectoryMetrics",
]
