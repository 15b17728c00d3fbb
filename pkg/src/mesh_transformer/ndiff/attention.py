"""Sparse masked attention over a boolean CSR mask."""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
import scipy.sparse as sp

from ..exceptions import NonSquareMaskError, ShapeMismatchError
from ..graphcore.mask import SparseMask
from .tensor import Tensor

AttentionMode = Literal["neighborhood", "dense"]


def _check_inputs(q: Tensor, k: Tensor, v: Tensor, mask: SparseMask) -> None:
    if not mask.is_square:
        raise NonSquareMaskError(f"Attention mask must be square, got {mask.shape}")
    if q.shape != k.shape or q.shape[0] != v.shape[0] or q.value.ndim != 2:
        raise ShapeMismatchError(
            f"Attention inputs disagree: Q{q.shape} K{k.shape} V{v.shape}"
        )
    if mask.num_rows != q.shape[0]:
        raise ShapeMismatchError(
            f"Mask covers {mask.num_rows} nodes, attention inputs have {q.shape[0]}"
        )


def neighborhood_weights(q: np.ndarray, k: np.ndarray, mask: SparseMask) -> np.ndarray:
    """
    Softmax weights over each row's mask support, one per stored entry.

    Scores are ``q_i·k_j / sqrt(d_h)``; each row is stabilized by its maximum.
    """
    rows = mask.row_ids()
    cols = mask.col_indices
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=q.dtype)
    scores = np.einsum("ij,ij->i", q[rows], k[cols]) / math.sqrt(q.shape[1])
    row_max = np.full(mask.num_rows, -np.inf, dtype=scores.dtype)
    np.maximum.at(row_max, rows, scores)
    exp = np.exp(scores - row_max[rows])
    denom = np.bincount(rows, weights=exp, minlength=mask.num_rows)
    return (exp / denom[rows]).astype(q.dtype, copy=False)


def _neighborhood(q: Tensor, k: Tensor, v: Tensor, mask: SparseMask) -> Tensor:
    qv, kv, vv = q.value, k.value, v.value
    n = mask.num_rows
    rows = mask.row_ids()
    cols = mask.col_indices
    inv_scale = 1.0 / math.sqrt(qv.shape[1])
    weights = neighborhood_weights(qv, kv, mask)
    w_matrix = sp.csr_matrix((weights, cols, mask.row_offsets), shape=(n, n))
    out = np.asarray(w_matrix @ vv)

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        dv = np.asarray(w_matrix.T @ g)
        dw = np.einsum("ij,ij->i", g[rows], vv[cols])
        row_dot = np.bincount(rows, weights=weights * dw, minlength=n)
        ds = weights * (dw - row_dot[rows])
        s_matrix = sp.csr_matrix((ds, cols, mask.row_offsets), shape=(n, n))
        dq = np.asarray(s_matrix @ kv) * inv_scale
        dk = np.asarray(s_matrix.T @ qv) * inv_scale
        return dq, dk, dv

    return q.tape.record("masked_attention", out, (q, k, v), vjp)


def _dense_literal(q: Tensor, k: Tensor, v: Tensor, mask: SparseMask) -> Tensor:
    qv, kv, vv = q.value, k.value, v.value
    inv_scale = 1.0 / math.sqrt(qv.shape[1])
    dense_mask = mask.to_dense().astype(qv.dtype)
    scores = (qv @ kv.T) * inv_scale
    scores = scores - scores.max(axis=1, keepdims=True)
    probs = np.exp(scores)
    probs /= probs.sum(axis=1, keepdims=True)
    masked = probs * dense_mask
    out = masked @ vv

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        dv = masked.T @ g
        dp = (g @ vv.T) * dense_mask
        ds = probs * (dp - np.sum(dp * probs, axis=1, keepdims=True))
        return (ds @ kv) * inv_scale, (ds.T @ qv) * inv_scale, dv

    return q.tape.record("masked_attention_dense", out, (q, k, v), vjp)


def masked_attention(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    mask: SparseMask,
    mode: AttentionMode = "neighborhood",
) -> Tensor:
    """
    Single-head attention restricted by a sparse mask.

    Args:
        q: N×d_h queries
        k: N×d_h keys
        v: N×d_h values
        mask: Square N×N boolean mask
        mode: ``neighborhood`` normalizes over each row's support (rows with
            empty support output zero); ``dense`` takes the full N×N softmax
            and multiplies it by the mask afterwards

    Returns:
        N×d_h attention output

    Raises:
        NonSquareMaskError: If the mask is not square
        ShapeMismatchError: If Q, K, V and the mask disagree on N
    """
    _check_inputs(q, k, v, mask)
    if mode == "dense":
        return _dense_literal(q, k, v, mask)
    return _neighborhood(q, k, v, mask)
