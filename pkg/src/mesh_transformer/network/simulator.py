"""A trained transformer wrapped as a next-step field predictor."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from typing import Literal

import numpy as np

from ..augment.builder import MaskBuilder
from ..graphcore.trajectory import Trajectory
from ..models.config import ModelConfig
from ..ndiff import Tape, Tensor
from ..settings import RuntimeSettings
from .features import build_inputs
from .normalizer import Normalizer
from .transformer import apply
from .weights import Weights

logger = logging.getLogger("mesh-transformer.network")


def step_targets(
    traj: Trajectory,
    t: int,
    target_kind: Literal["delta", "absolute"],
    state: np.ndarray | None = None,
) -> np.ndarray:
    """
    Physical-unit training target for predicting frame t+1 from ``state``.

    The next frame is always taken from the clean trajectory; a delta target
    is measured against the (possibly noisy) input state.
    """
    dyn = traj.dynamic_columns
    clean_next = traj.fields[t + 1][:, dyn]
    if target_kind == "absolute":
        return clean_next
    current = traj.fields[t] if state is None else state
    return clean_next - current[:, dyn]


def fit_normalizers(
    trajectories: Iterable[Trajectory],
    target_kind: Literal["delta", "absolute"],
) -> tuple[Normalizer, Normalizer]:
    """Accumulate input and target statistics over every clean transition."""
    input_norm: Normalizer | None = None
    target_norm: Normalizer | None = None
    for traj in trajectories:
        for t in range(traj.num_frames - 1):
            prev = traj.fields[t - 1] if (traj.history_depth == 1 and t > 0) else None
            inputs = build_inputs(traj, traj.fields[t], prev)
            targets = step_targets(traj, t, target_kind)
            if input_norm is None or target_norm is None:
                input_norm = Normalizer(inputs.shape[1])
                target_norm = Normalizer(targets.shape[1])
            input_norm.accumulate(inputs)
            target_norm.accumulate(targets)
    if input_norm is None or target_norm is None:
        raise ValueError("Normalizers need at least one trajectory with two frames")
    return input_norm, target_norm


class Simulator:
    """
    Config, weights and normalizers of one model, usable as a rollout step model.

    ``predict`` returns the next dynamic fields in physical units as a delta or
    an absolute value according to ``target_kind``.
    """

    def __init__(
        self,
        cfg: ModelConfig,
        weights: Weights,
        input_norm: Normalizer,
        target_norm: Normalizer,
        settings: RuntimeSettings | None = None,
    ) -> None:
        weights.check_shapes(cfg)
        self.cfg = cfg
        self.weights = weights
        self.input_norm = input_norm
        self.target_norm = target_norm
        self.settings = settings or RuntimeSettings()
        self.builder = MaskBuilder(cfg.augment, cfg.layers, cfg.heads, self_loops=cfg.self_loops)

    @property
    def target_kind(self) -> Literal["delta", "absolute"]:
        return self.cfg.target_kind

    def normalized_inputs(
        self, traj: Trajectory, state: np.ndarray, prev_state: np.ndarray | None
    ) -> np.ndarray:
        return self.input_norm.normalize(build_inputs(traj, state, prev_state))

    def network(
        self,
        tape: Tape,
        params: Mapping[str, Tensor],
        traj: Trajectory,
        inputs: Tensor,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Normalized network output on ``tape`` for already-normalized inputs."""
        g = traj.graph
        return apply(
            inputs,
            params,
            self.builder.plan(g, rng),
            self.cfg,
            self.builder.positional(g, self.cfg.pe),
        )

    def predict(
        self,
        traj: Trajectory,
        state: np.ndarray,
        prev_state: np.ndarray | None = None,
        t: int | None = None,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Next dynamic fields (delta or absolute) in physical units, N×F_dyn."""
        tape = Tape(dtype=self.weights.dtype, record=False, check_finite=self.settings.debug_finite)
        params = {name: tape.constant(a) for name, a in self.weights.items()}
        inputs = tape.constant(self.normalized_inputs(traj, state, prev_state))
        out = self.network(tape, params, traj, inputs, rng)
        return self.target_norm.denormalize(out.value.astype(np.float64))

    def with_weights(self, weights: Weights) -> Simulator:
        return Simulator(self.cfg, weights, self.input_norm, self.target_norm, self.settings)
