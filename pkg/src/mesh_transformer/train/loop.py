"""Next-step training loop."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..dataio.dataset import MeshDataset
from ..exceptions import NonFiniteLossError
from ..graphcore.trajectory import Trajectory
from ..models.config import ModelConfig, TrainConfig
from ..models.constants import DEFAULT_FORCED_NODE_TYPES
from ..models.records import RunRecord
from ..ndiff import Tape, Tensor, mse
from ..network.features import feature_width
from ..network.simulator import Simulator, fit_normalizers, step_targets
from ..network.weights import Weights, init_weights, param_count
from ..rollout.metrics import evaluate
from ..settings import RuntimeSettings
from ..utils.io import ensure_output_dir, write_json
from ..utils.lifecycle import shutdown_requested
from .noise import noisy_state
from .optimizer import AdamState, adamw_step
from .schedules import lr_at
from .streams import RandomStreams

logger = logging.getLogger("mesh-transformer.train")

CURVE_COLUMNS = ["step", "lr", "loss"]
LOSS_CURVE_FILENAME = "loss_curve.csv"
RUN_RECORD_FILENAME = "run_record.json"

# (tape, watched params, trajectory, t, streams) -> (scalar loss, nodes processed)
LossFn = Callable[[Tape, Mapping[str, Tensor], Trajectory, int, RandomStreams], tuple[Tensor, int]]


@dataclass
class OptimizeResult:
    arrays: dict[str, np.ndarray]
    curve: pd.DataFrame
    steps: int
    training_nodes: int
    stopped_early: bool
    window: int = 1

    @property
    def final_loss(self) -> float:
        """Mean loss over the last logging window."""
        if self.curve.empty:
            return float("nan")
        return float(self.curve["loss"].tail(self.window).mean())


@dataclass
class TrainResult:
    """Trained weights, the run record and the per-step loss curve."""

    simulator: Simulator
    record: RunRecord
    curve: pd.DataFrame
    stopped_early: bool = False

    @property
    def weights(self) -> Weights:
        return self.simulator.weights

    def write(self, out_dir: str | Path) -> Path:
        """Write the loss curve CSV and the run record JSON into ``out_dir``."""
        directory = ensure_output_dir(out_dir)
        self.curve.to_csv(directory / LOSS_CURVE_FILENAME, index=False)
        write_json(directory / RUN_RECORD_FILENAME, self.record.to_simplified_dict())
        return directory


def model_for_dataset(cfg: ModelConfig, dataset: MeshDataset) -> ModelConfig:
    """Set the input/output widths and coordinate dimension from the dataset's layout."""
    traj = dataset[0]
    p_in = feature_width(traj.num_fields, traj.num_dynamic, traj.history_depth)
    update = {"p_in": p_in, "p_out": traj.num_dynamic, "coord_dim": traj.graph.dim}
    if all(getattr(cfg, key) == value for key, value in update.items()):
        return cfg
    logger.debug(f"Model widths set from dataset: {update}")
    return ModelConfig.model_validate({**cfg.model_dump(), **update})


def build_simulator(
    cfg: ModelConfig,
    dataset: MeshDataset,
    seed: int = 0,
    settings: RuntimeSettings | None = None,
) -> Simulator:
    """Fresh simulator with dataset widths, fitted normalizers and initial weights."""
    settings = settings or RuntimeSettings()
    cfg = model_for_dataset(cfg, dataset)
    input_norm, target_norm = fit_normalizers(dataset, cfg.target_kind)
    weights = init_weights(cfg, RandomStreams(seed).init, settings.dtype)
    return Simulator(cfg, weights, input_norm, target_norm, settings)


def optimize(
    arrays: Mapping[str, np.ndarray],
    loss_fn: LossFn,
    dataset: MeshDataset,
    train_cfg: TrainConfig,
    dtype: np.dtype,
    check_finite: bool = False,
    label: str = "train",
) -> OptimizeResult:
    """
    Shared optimizer loop: sample, accumulate gradients over ``batch`` graphs, step.

    Update number s (1-based) uses ``lr_at(schedule, s)``.

    Raises:
        NonFiniteLossError: If a loss is NaN or Inf
    """
    streams = RandomStreams(train_cfg.seed)
    weights = {name: np.array(a, dtype=dtype, copy=True) for name, a in arrays.items()}
    state = AdamState.zeros_like(weights)
    total = train_cfg.total_iters
    rows: list[tuple[int, float, float]] = []
    nodes = 0
    stopped = False

    for step in range(1, total + 1):
        if shutdown_requested():
            logger.warning(f"[{label}] Shutdown requested, stopping after {step - 1} steps")
            stopped = True
            break
        lr = lr_at(train_cfg.schedule, step)
        grads = {name: np.zeros_like(w) for name, w in weights.items()}
        batch_loss = 0.0
        for _ in range(train_cfg.batch):
            traj, t = dataset.sample(streams.sampling)
            tape = Tape(dtype=dtype, check_finite=check_finite)
            params = tape.watch_all(weights)
            loss, processed = loss_fn(tape, params, traj, t, streams)
            value = loss.item()
            if not np.isfinite(value):
                raise NonFiniteLossError(
                    f"[{label}] Non-finite loss {value} at step {step} (lr={lr:.3g}, t={t}, "
                    f"N={traj.num_nodes})",
                    step=step,
                    lr=lr,
                )
            for name, grad in tape.backward(loss).items():
                grads[name] += grad / train_cfg.batch
            batch_loss += value / train_cfg.batch
            nodes += processed
        adamw_step(weights, grads, state, lr, train_cfg.optimizer)
        rows.append((step, lr, batch_loss))
        if step % train_cfg.log_every == 0 or step == total:
            logger.info(f"[{label}] step {step}/{total} lr={lr:.3e} loss={batch_loss:.6g}")

    return OptimizeResult(
        arrays=weights,
        curve=pd.DataFrame(rows, columns=CURVE_COLUMNS),
        steps=len(rows),
        training_nodes=nodes,
        stopped_early=stopped,
        window=min(train_cfg.log_every, max(len(rows), 1)),
    )


def next_step_loss(sim: Simulator, sigmas: tuple[float, ...]) -> LossFn:
    """L2 loss of the normalized next-step target with noise on the input state."""

    def loss_fn(
        tape: Tape,
        params: Mapping[str, Tensor],
        traj: Trajectory,
        t: int,
        streams: RandomStreams,
    ) -> tuple[Tensor, int]:
        state = noisy_state(traj.fields[t], traj.dynamic_columns, sigmas, streams.noise)
        prev = traj.fields[t - 1] if (traj.history_depth == 1 and t > 0) else None
        inputs = tape.constant(sim.normalized_inputs(traj, state, prev))
        out = sim.network(tape, params, traj, inputs, streams.random_edges)
        target = sim.target_norm.normalize(step_targets(traj, t, sim.target_kind, state))
        return mse(out, target), traj.num_nodes

    return loss_fn


def run_record(
    cfg: ModelConfig,
    loss: float,
    steps: int,
    training_nodes: int,
    all_rollout: float | None = None,
    budget_label: float | None = None,
) -> RunRecord:
    params = param_count(cfg)
    return RunRecord(
        flop_budget=6.0 * params * training_nodes,
        param_count=params,
        training_nodes=training_nodes,
        steps=steps,
        final_loss=loss,
        final_all_rollout=all_rollout,
        d=cfg.d,
        layers=cfg.layers,
        budget_label=budget_label,
    )


def train_steps(
    sim: Simulator,
    dataset: MeshDataset,
    train_cfg: TrainConfig,
    eval_data: MeshDataset | None = None,
    budget_label: float | None = None,
) -> TrainResult:
    """
    Train a simulator on next-step prediction.

    Each step samples a (trajectory, t) pair, perturbs the dynamic fields with
    the configured noise, regenerates random-edge augmentation, and applies
    one AdamW update from the L2 loss. Targets always come from the clean
    trajectory. The run's FLOPs are 6·P·D with D the number of nodes processed.

    Args:
        sim: Simulator holding the initial weights and fitted normalizers
        dataset: Training trajectories
        train_cfg: Optimizer, schedule, noise and loop settings
        eval_data: When given, the all-rollout metric on it is recorded
        budget_label: Nominal FLOPs budget of a sweep run

    Returns:
        TrainResult with a simulator holding the trained weights

    Raises:
        NonFiniteLossError: If a loss is NaN or Inf
    """
    train_cfg = train_cfg.resolved_for(dataset.num_samples)
    sigmas = train_cfg.noise_sigmas
    logger.info(
        f"Training d={sim.cfg.d} L={sim.cfg.layers} H={sim.cfg.heads} "
        f"({param_count(sim.cfg)} params) for {train_cfg.total_iters} steps"
    )
    result = optimize(
        sim.weights,
        next_step_loss(sim, sigmas),
        dataset,
        train_cfg,
        sim.weights.dtype,
        check_finite=sim.settings.debug_finite,
    )
    trained = sim.with_weights(Weights(result.arrays))

    all_rollout = None
    if eval_data is not None and len(eval_data) > 0:
        report = evaluate(
            trained,
            eval_data.trajectories,
            eval_data.names,
            DEFAULT_FORCED_NODE_TYPES,
            with_persistence=False,
            seed=train_cfg.seed,
        )
        all_rollout = report.aggregate.all_rollout

    record = run_record(
        sim.cfg,
        result.final_loss,
        result.steps,
        result.training_nodes,
        all_rollout,
        budget_label,
    )
    return TrainResult(trained, record, result.curve, result.stopped_early)
