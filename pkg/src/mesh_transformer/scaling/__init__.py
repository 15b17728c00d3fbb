"""isoFLOP aggregation, compute-optimal minima and power-law fits."""

from .fit import fit_power_law, loss_metric_correlation
from .isoflop import fit_log_parabola, isoflop_minimum
from .sweep import (
    FIT_JSON,
    SWEEP_COLUMNS,
    SWEEP_CSV,
    SweepResult,
    SweepRun,
    aggregate,
    grid_model,
    load_runs_csv,
    plan_sweep,
    records_frame,
    steps_for_budget,
    sweep_driver,
)

__all__ = [
    "FIT_JSON",
    "SWEEP_COLUMNS",
    "SWEEP_CSV",
    "SweepResult",
    "SweepRun",
    "aggregate",
    "fit_log_parabola",
    "fit_power_law",
    "grid_model",
    "isoflop_minimum",
    "load_runs_csv",
    "loss_metric_correlation",
    "plan_sweep",
    "records_frame",
    "steps_for_budget",
    "sweep_driver",
]
