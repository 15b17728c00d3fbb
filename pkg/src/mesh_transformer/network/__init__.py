"""Encode-Process-Decode transformer, parameter and FLOPs accounting."""

from .features import build_inputs, feature_width, node_type_one_hot
from .flops import (
    flops_estimate,
    message_passing_flops_per_node,
    training_flops,
    transformer_flops_per_node,
)
from .layers import block_forward, decode, encode, gated_mlp, multi_head_attention
from .normalizer import Normalizer
from .simulator import Simulator, fit_normalizers, step_targets
from .transformer import apply, forward
from .weights import Weights, init_weights, param_count, parameter_shapes, transfer_weights

__all__ = [
    "Normalizer",
    "Simulator",
    "Weights",
    "apply",
    "block_forward",
    "build_inputs",
    "decode",
    "encode",
    "feature_width",
    "fit_normalizers",
    "flops_estimate",
    "forward",
    "gated_mlp",
    "init_weights",
    "message_passing_flops_per_node",
    "multi_head_attention",
    "node_type_one_hot",
    "param_count",
    "parameter_shapes",
    "step_targets",
    "training_flops",
    "transfer_weights",
    "transformer_flops_per_node",
]
