"""Encode-Process-Decode forward pass."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from ..augment.builder import MaskBuilder
from ..augment.plan import HeadMaskPlan
from ..exceptions import ShapeMismatchError
from ..graphcore.graph import Graph
from ..graphcore.trajectory import NodeFeatures
from ..models.config import ModelConfig
from ..ndiff import Tape, Tensor, concat_columns
from .layers import Params, block_forward, decode, encode
from .weights import Weights


def apply(
    x: Tensor,
    params: Params,
    plan: HeadMaskPlan,
    cfg: ModelConfig,
    positional: np.ndarray | None = None,
) -> Tensor:
    """
    Run encoder, L blocks and decoder on tape tensors.

    Args:
        x: N×p_in node features (already normalized)
        params: Watched parameter tensors
        plan: Mask per (layer, head)
        cfg: Model configuration
        positional: N×q encoding appended to ``x``

    Raises:
        ShapeMismatchError: If the feature width differs from p_in + q
    """
    if positional is not None and positional.shape[1] > 0:
        x = concat_columns([x, x.tape.constant(positional)])
    if x.shape[1] != cfg.input_width:
        raise ShapeMismatchError(
            f"Encoder expects {cfg.input_width} input columns, got {x.shape[1]}"
        )
    if plan.num_layers != cfg.layers:
        raise ShapeMismatchError(f"Plan has {plan.num_layers} layers, model has {cfg.layers}")
    z = encode(x, params)
    for layer in range(cfg.layers):
        z = block_forward(z, params, plan, layer, cfg)
    return decode(z, params)


def forward(
    g: Graph,
    x: NodeFeatures | np.ndarray,
    cfg: ModelConfig,
    w: Weights | Mapping[str, np.ndarray],
    builder: MaskBuilder | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Inference forward pass: masks and positional encoding are built from ``g``.

    Returns:
        N×p_out output array
    """
    values = x.values if isinstance(x, NodeFeatures) else np.asarray(x)
    if values.shape[0] != g.num_nodes:
        raise ShapeMismatchError(f"Features cover {values.shape[0]} nodes, graph has {g.num_nodes}")
    if builder is None:
        builder = MaskBuilder(cfg.augment, cfg.layers, cfg.heads, self_loops=cfg.self_loops)
    first = next(iter(w.values()))
    tape = Tape(dtype=first.dtype, record=False)
    params = {name: tape.constant(array) for name, array in w.items()}
    out = apply(
        tape.constant(values),
        params,
        builder.plan(g, rng),
        cfg,
        builder.positional(g, cfg.pe),
    )
    return out.value
