"""isoFLOP sweep driver: train every grid model at every budget, then fit."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from ..dataio.dataset import MeshDataset
from ..exceptions import BudgetTooSmallError, ScalingError
from ..models.config import GridEntry, ModelConfig, SweepSpec, TrainConfig, with_total_iters
from ..models.records import IsoFlopGroup, IsoFlopMinimum, PowerLawFit, RunRecord
from ..network.weights import param_count
from ..settings import RuntimeSettings
from ..train.loop import build_simulator, train_steps
from ..utils.io import ensure_output_dir, write_json
from ..utils.lifecycle import shutdown_requested
from .fit import fit_power_law, loss_metric_correlation
from .isoflop import isoflop_minimum

logger = logging.getLogger("mesh-transformer.scaling")

SWEEP_CSV = "sweep.csv"
FIT_JSON = "fit.json"
SWEEP_COLUMNS = [
    "budget",
    "d",
    "L",
    "P",
    "steps",
    "nodes",
    "flops",
    "final_loss",
    "all_rollout",
]
BUDGET_TOLERANCE = 0.02


@dataclass(frozen=True)
class SweepRun:
    """One (budget, model) pair with its step count."""

    budget: float
    model: ModelConfig
    steps: int


@dataclass
class SweepResult:
    records: list[RunRecord]
    groups: list[IsoFlopGroup] = field(default_factory=list)
    minima: list[IsoFlopMinimum] = field(default_factory=list)
    fit: PowerLawFit | None = None
    skipped: list[float] = field(default_factory=list)

    def frame(self) -> pd.DataFrame:
        return records_frame(self.records)

    def summary(self) -> dict:
        summary: dict = {
            "minima": [m.to_simplified_dict() for m in self.minima],
            "fit": self.fit.to_simplified_dict() if self.fit else None,
            "skipped_budgets": self.skipped,
        }
        try:
            summary["correlation"] = loss_metric_correlation(self.records).to_simplified_dict()
        except ScalingError:
            summary["correlation"] = None
        return summary

    def write(self, out_dir: str | Path) -> Path:
        """Write the sweep CSV and the fit summary JSON."""
        directory = ensure_output_dir(out_dir)
        self.frame().to_csv(directory / SWEEP_CSV, index=False)
        write_json(directory / FIT_JSON, self.summary())
        return directory


def grid_model(base: ModelConfig, entry: GridEntry) -> ModelConfig:
    return ModelConfig.model_validate(
        {
            **base.model_dump(),
            "preset": "custom",
            "d": entry.d,
            "layers": entry.layers,
            "heads": entry.heads,
        }
    )


def steps_for_budget(
    budget: float, params: int, nodes_per_step: float, min_steps: int
) -> int:
    """
    steps = floor(C / (6·P·nodes_per_step)).

    Raises:
        BudgetTooSmallError: If fewer than ``min_steps`` steps fit in the budget
    """
    steps = math.floor(budget / (6.0 * params * nodes_per_step))
    if steps < min_steps:
        raise BudgetTooSmallError(
            f"Budget {budget:.3g} gives {steps} steps for P={params}, need at least {min_steps}"
        )
    return steps


def plan_sweep(
    base: ModelConfig,
    spec: SweepSpec,
    nodes_per_step: float,
) -> list[SweepRun]:
    """Every (budget, grid model) pair with its matched schedule length."""
    runs = []
    for budget in spec.budgets:
        for entry in spec.grid:
            cfg = grid_model(base, entry)
            steps = steps_for_budget(budget, param_count(cfg), nodes_per_step, spec.min_steps)
            runs.append(SweepRun(budget, cfg, steps))
    return runs


def _train_one(
    run: SweepRun,
    dataset: MeshDataset,
    train_cfg: TrainConfig,
    eval_data: MeshDataset | None,
    settings: RuntimeSettings,
) -> RunRecord:
    run_cfg = train_cfg.model_copy(
        update={"epochs": None, "schedule": with_total_iters(train_cfg.schedule, run.steps)}
    )
    sim = build_simulator(run.model, dataset, train_cfg.seed, settings)
    result = train_steps(sim, dataset, run_cfg, eval_data, budget_label=run.budget)
    logger.info(
        f"Budget {run.budget:.3g} d={run.model.d} L={run.model.layers}: "
        f"loss={result.record.final_loss:.5g} after {result.record.steps} steps"
    )
    return result.record


def aggregate(
    records: Sequence[RunRecord],
    refine: bool = True,
    tolerance: float = BUDGET_TOLERANCE,
) -> SweepResult:
    """Group runs by budget label, take each group's minimum, and fit P* against C."""
    budgets = sorted({r.budget_label for r in records if r.budget_label is not None})
    result = SweepResult(records=list(records))
    for budget in budgets:
        labelled = [r for r in records if r.budget_label == budget]
        group = IsoFlopGroup.from_records(budget, labelled, tolerance)
        if len(group.runs) < len(labelled):
            logger.warning(
                f"Budget {budget:.3g}: {len(labelled) - len(group.runs)} runs outside "
                f"{tolerance:.0%} of the budget were dropped"
            )
        result.groups.append(group)
        try:
            result.minima.append(isoflop_minimum(group, refine))
        except ScalingError as e:
            logger.warning(f"Budget {budget:.3g} skipped: {e}")
            result.skipped.append(budget)
    if len(result.minima) >= 2:
        result.fit = fit_power_law([(m.budget, m.param_count) for m in result.minima])
    return result


def sweep_driver(
    base: ModelConfig,
    spec: SweepSpec,
    dataset: MeshDataset,
    train_cfg: TrainConfig,
    eval_data: MeshDataset | None = None,
    settings: RuntimeSettings | None = None,
    workers: int | None = None,
) -> SweepResult:
    """
    Run an isoFLOP sweep.

    Each (budget, model) pair trains for floor(C / (6·P·nodes_per_step)) steps
    with the schedule's length matched to the run. Runs execute in a process
    pool when more than one worker is requested.

    Raises:
        BudgetTooSmallError: If any pair gets fewer than ``spec.min_steps`` steps
    """
    settings = settings or RuntimeSettings()
    workers = workers or spec.workers
    nodes_per_step = dataset.nodes_per_sample * train_cfg.batch
    runs = plan_sweep(base, spec, nodes_per_step)
    evaluation = eval_data if spec.eval_rollout else None
    logger.info(f"Sweep: {len(runs)} runs over {len(spec.budgets)} budgets with {workers} workers")

    records: list[RunRecord] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_train_one, run, dataset, train_cfg, evaluation, settings)
                for run in runs
            ]
            records = [f.result() for f in futures]
    else:
        for run in runs:
            if shutdown_requested():
                logger.warning(f"Shutdown requested, aggregating {len(records)} finished runs")
                break
            records.append(_train_one(run, dataset, train_cfg, evaluation, settings))
    return aggregate(records, spec.refine)


def records_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    rows = [
        (
            r.budget_label if r.budget_label is not None else r.flop_budget,
            r.d,
            r.layers,
            r.param_count,
            r.steps,
            r.training_nodes,
            r.flop_budget,
            r.final_loss,
            r.final_all_rollout,
        )
        for r in records
    ]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def load_runs_csv(path: str | Path) -> list[RunRecord]:
    """
    Read a sweep CSV back into run records.

    Raises:
        ScalingError: If required columns are missing
    """
    frame = pd.read_csv(path)
    missing = {"budget", "P", "final_loss"} - set(frame.columns)
    if missing:
        raise ScalingError(f"Runs CSV {path} lacks columns {sorted(missing)}")
    records = []
    for row in frame.to_dict(orient="records"):
        params = int(row["P"])
        flops = _optional(row, "flops")
        flops = float(row["budget"]) if flops is None else flops
        nodes = _optional(row, "nodes")
        d, layers, steps = (_optional(row, key) for key in ("d", "L", "steps"))
        records.append(
            RunRecord(
                flop_budget=flops,
                param_count=params,
                training_nodes=round(flops / (6.0 * params)) if nodes is None else int(nodes),
                steps=0 if steps is None else int(steps),
                final_loss=float(row["final_loss"]),
                final_all_rollout=_optional(row, "all_rollout"),
                d=None if d is None else int(d),
                layers=None if layers is None else int(layers),
                budget_label=float(row["budget"]),
            )
        )
    logger.info(f"Loaded {len(records)} runs from {path}")
    return records


def _optional(row: dict, key: str) -> float | None:
    value = row.get(key)
    return None if value is None or pd.isna(value) else float(value)
