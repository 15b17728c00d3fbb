"""Minimal reverse-mode numerical core for the mesh transformer."""

from .attention import AttentionMode, masked_attention, neighborhood_weights
from .gradcheck import finite_diff_check
from .ops import (
    add,
    column_slice,
    concat_columns,
    fill_masked,
    gelu,
    hadamard,
    linear,
    mse,
    rmsnorm,
    scale,
    sum_squares,
    take_rows,
    weighted_sum,
)
from .tensor import Gradients, Tape, Tensor

__all__ = [
    "AttentionMode",
    "Gradients",
    "Tape",
    "Tensor",
    "add",
    "column_slice",
    "concat_columns",
    "fill_masked",
    "finite_diff_check",
    "gelu",
    "hadamard",
    "linear",
    "masked_attention",
    "mse",
    "neighborhood_weights",
    "rmsnorm",
    "scale",
    "sum_squares",
    "take_rows",
    "weighted_sum",
]
