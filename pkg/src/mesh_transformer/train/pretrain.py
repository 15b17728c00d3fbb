"""Masked-node pretraining of an encoder transformer with a throwaway decoder."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..augment.builder import MaskBuilder
from ..dataio.dataset import MeshDataset
from ..exceptions import ConfigurationError, NoMaskedNodesError, ShapeMismatchError
from ..graphcore.trajectory import Trajectory
from ..models.config import ModelConfig, TrainConfig
from ..models.records import RunRecord
from ..ndiff import Tape, Tensor, fill_masked, mse
from ..network.features import build_inputs
from ..network.normalizer import Normalizer
from ..network.simulator import fit_normalizers
from ..network.transformer import apply
from ..network.weights import Weights, init_weights, param_count
from ..settings import RuntimeSettings
from .loop import model_for_dataset, optimize
from .streams import RandomStreams

logger = logging.getLogger("mesh-transformer.train")

ENCODER_PREFIX = "encoder/"
DECODER_PREFIX = "decoder/"
MASK_TOKEN = "mask_token"


@dataclass
class PretrainResult:
    """Pretrained encoder weights; the decoder is kept only for inspection."""

    encoder_cfg: ModelConfig
    encoder: Weights
    decoder: Weights
    mask_token: np.ndarray
    input_norm: Normalizer
    record: RunRecord
    curve: pd.DataFrame
    stopped_early: bool = False


def masked_rows(num_nodes: int, mask_fraction: float, rng: np.random.Generator) -> np.ndarray:
    """
    Sorted random subset of round(mask_fraction·N) nodes.

    Raises:
        NoMaskedNodesError: If the subset is empty
    """
    count = int(round(mask_fraction * num_nodes))
    if count == 0:
        raise NoMaskedNodesError(
            f"mask_fraction={mask_fraction} selects no node of a graph with {num_nodes} nodes"
        )
    return np.sort(rng.choice(num_nodes, size=count, replace=False))


def _split(params: Mapping[str, Tensor], prefix: str) -> dict[str, Tensor]:
    return {name[len(prefix) :]: t for name, t in params.items() if name.startswith(prefix)}


def stacked_configs(
    encoder_cfg: ModelConfig, decoder_cfg: ModelConfig, dataset: MeshDataset
) -> tuple[ModelConfig, ModelConfig]:
    """Encoder reads the dataset features; the decoder maps its output to the dynamic fields."""
    traj = dataset[0]
    encoder_cfg = model_for_dataset(encoder_cfg, dataset).model_copy(
        update={"p_out": encoder_cfg.p_out}
    )
    update = {"p_in": encoder_cfg.p_out, "p_out": traj.num_dynamic, "coord_dim": traj.graph.dim}
    decoder_cfg = ModelConfig.model_validate({**decoder_cfg.model_dump(), **update})
    return encoder_cfg, decoder_cfg


def mask_pretrain(
    encoder_cfg: ModelConfig,
    decoder_cfg: ModelConfig,
    dataset: MeshDataset,
    mask_fraction: float,
    train_cfg: TrainConfig,
    settings: RuntimeSettings | None = None,
) -> PretrainResult:
    """
    Pretrain an encoder by reconstructing masked dynamic node features.

    Per step a random ``mask_fraction`` of the nodes gets its dynamic input
    columns replaced by a learned token. The encoder output feeds a decoder
    transformer, and the loss is the L2 reconstruction error of the clean
    (normalized) dynamic fields on the masked nodes only. Fine-tune from the
    result with ``transfer_weights(result.encoder, cfg)``.

    Args:
        encoder_cfg: Encoder architecture; its ``p_out`` is the width handed to the decoder
        decoder_cfg: Decoder architecture; its widths are set from the encoder and data
        dataset: Training trajectories
        mask_fraction: Fraction of nodes masked per step, in (0, 1)
        train_cfg: Optimizer, schedule and loop settings
        settings: Runtime precision and finite checks

    Raises:
        ConfigurationError: If mask_fraction is 1 or more
        NoMaskedNodesError: If mask_fraction selects no node of some graph
        NonFiniteLossError: If a loss is NaN or Inf
    """
    if mask_fraction <= 0.0:
        raise NoMaskedNodesError(f"mask_fraction={mask_fraction} masks no node")
    if mask_fraction >= 1.0:
        raise ConfigurationError(f"mask_fraction must be below 1, got {mask_fraction}")
    settings = settings or RuntimeSettings()
    train_cfg = train_cfg.resolved_for(dataset.num_samples)
    encoder_cfg, decoder_cfg = stacked_configs(encoder_cfg, decoder_cfg, dataset)
    input_norm, _ = fit_normalizers(dataset, encoder_cfg.target_kind)
    smallest = min(t.num_nodes for t in dataset)
    if int(round(mask_fraction * smallest)) == 0:
        raise NoMaskedNodesError(
            f"mask_fraction={mask_fraction} selects no node of the smallest graph (N={smallest})"
        )

    init = RandomStreams(train_cfg.seed).init
    encoder = init_weights(encoder_cfg, init, settings.dtype)
    decoder = init_weights(decoder_cfg, init, settings.dtype)
    arrays: dict[str, np.ndarray] = {
        **{ENCODER_PREFIX + k: v for k, v in encoder.items()},
        **{DECODER_PREFIX + k: v for k, v in decoder.items()},
        MASK_TOKEN: np.zeros(dataset[0].num_dynamic, dtype=settings.dtype),
    }
    encoder_builder = MaskBuilder(
        encoder_cfg.augment, encoder_cfg.layers, encoder_cfg.heads, encoder_cfg.self_loops
    )
    decoder_builder = MaskBuilder(
        decoder_cfg.augment, decoder_cfg.layers, decoder_cfg.heads, decoder_cfg.self_loops
    )

    def loss_fn(
        tape: Tape,
        params: Mapping[str, Tensor],
        traj: Trajectory,
        t: int,
        streams: RandomStreams,
    ) -> tuple[Tensor, int]:
        g = traj.graph
        prev = traj.fields[t - 1] if (traj.history_depth == 1 and t > 0) else None
        clean = input_norm.normalize(build_inputs(traj, traj.fields[t], prev))
        rows = masked_rows(g.num_nodes, mask_fraction, streams.mask)
        dyn = traj.dynamic_columns
        if dyn.shape[0] != params[MASK_TOKEN].shape[0]:
            raise ShapeMismatchError("All trajectories must share the dynamic field layout")
        masked = fill_masked(tape.constant(clean), rows, dyn, params[MASK_TOKEN])
        latent = apply(
            masked,
            _split(params, ENCODER_PREFIX),
            encoder_builder.plan(g, streams.random_edges),
            encoder_cfg,
            encoder_builder.positional(g, encoder_cfg.pe),
        )
        out = apply(
            latent,
            _split(params, DECODER_PREFIX),
            decoder_builder.plan(g, streams.random_edges),
            decoder_cfg,
            decoder_builder.positional(g, decoder_cfg.pe),
        )
        return mse(out, clean[np.ix_(rows, dyn)], rows), g.num_nodes

    logger.info(
        f"Masked pretraining: encoder {param_count(encoder_cfg)} + decoder "
        f"{param_count(decoder_cfg)} params, mask_fraction={mask_fraction}"
    )
    result = optimize(
        arrays,
        loss_fn,
        dataset,
        train_cfg,
        np.dtype(settings.dtype),
        check_finite=settings.debug_finite,
        label="pretrain",
    )
    trained = result.arrays
    encoder_trained = Weights(
        {k[len(ENCODER_PREFIX) :]: v for k, v in trained.items() if k.startswith(ENCODER_PREFIX)}
    )
    decoder_trained = Weights(
        {k[len(DECODER_PREFIX) :]: v for k, v in trained.items() if k.startswith(DECODER_PREFIX)}
    )
    params = param_count(encoder_cfg) + param_count(decoder_cfg)
    record = RunRecord(
        flop_budget=6.0 * params * result.training_nodes,
        param_count=params,
        training_nodes=result.training_nodes,
        steps=result.steps,
        final_loss=result.final_loss,
        d=encoder_cfg.d,
        layers=encoder_cfg.layers + decoder_cfg.layers,
    )
    return PretrainResult(
        encoder_cfg=encoder_cfg,
        encoder=encoder_trained,
        decoder=decoder_trained,
        mask_token=trained[MASK_TOKEN],
        input_norm=input_norm,
        record=record,
        curve=result.curve,
        stopped_early=result.stopped_early,
    )

