"""Differentiable dense primitives used by the network and the trainer."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from scipy.special import ndtr

from ..exceptions import ShapeMismatchError
from .tensor import Tensor

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _require_same_shape(op: str, x: Tensor, y: Tensor) -> None:
    if x.shape != y.shape:
        raise ShapeMismatchError(f"{op}: shapes {x.shape} and {y.shape} differ")


def linear(x: Tensor, w: Tensor, bias: Tensor | None = None) -> Tensor:
    """
    Affine map ``x @ w + bias`` with the bias broadcast over rows.

    Raises:
        ShapeMismatchError: If x is not N×a, w not a×b, or bias not of length b
    """
    if x.value.ndim != 2 or w.value.ndim != 2 or x.shape[1] != w.shape[0]:
        raise ShapeMismatchError(f"linear: cannot multiply {x.shape} by {w.shape}")
    if bias is not None and bias.shape != (w.shape[1],):
        raise ShapeMismatchError(f"linear: bias {bias.shape} does not match {w.shape}")

    xv, wv = x.value, w.value
    out = xv @ wv
    if bias is None:

        def vjp_nobias(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            return g @ wv.T, xv.T @ g

        return x.tape.record("linear", out, (x, w), vjp_nobias)

    out = out + bias.value

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return g @ wv.T, xv.T @ g, g.sum(axis=0)

    return x.tape.record("linear", out, (x, w, bias), vjp)


def gelu(x: Tensor) -> Tensor:
    """Exact GeLU ``x·Φ(x)`` with Φ the standard normal CDF."""
    xv = x.value
    cdf = ndtr(xv)

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * xv * xv)
        return (g * (cdf + xv * pdf),)

    return x.tape.record("gelu", xv * cdf, (x,), vjp)


def rmsnorm(x: Tensor, gain: Tensor, eps: float = 1e-6) -> Tensor:
    """Per-row ``x / sqrt(mean(x²) + eps) ⊙ gain``."""
    if x.value.ndim != 2 or gain.shape != (x.shape[1],):
        raise ShapeMismatchError(f"rmsnorm: gain {gain.shape} does not match {x.shape}")
    xv, gv = x.value, gain.value
    rms = np.sqrt(np.mean(xv * xv, axis=1, keepdims=True) + eps)
    normed = xv / rms

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = g * gv
        dx = (a - normed * np.mean(a * normed, axis=1, keepdims=True)) / rms
        return dx, np.sum(g * normed, axis=0)

    return x.tape.record("rmsnorm", normed * gv, (x, gain), vjp)


def hadamard(x: Tensor, y: Tensor) -> Tensor:
    _require_same_shape("hadamard", x, y)
    xv, yv = x.value, y.value

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g * yv, g * xv

    return x.tape.record("hadamard", xv * yv, (x, y), vjp)


def add(x: Tensor, y: Tensor) -> Tensor:
    _require_same_shape("add", x, y)

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g, g

    return x.tape.record("add", x.value + y.value, (x, y), vjp)


def scale(x: Tensor, factor: float) -> Tensor:
    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (g * factor,)

    return x.tape.record("scale", x.value * factor, (x,), vjp)


def column_slice(x: Tensor, start: int, stop: int) -> Tensor:
    """Columns ``start:stop`` of an N×d tensor (one attention head)."""
    width = x.shape[1]

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros((g.shape[0], width), dtype=g.dtype)
        full[:, start:stop] = g
        return (full,)

    return x.tape.record("column_slice", x.value[:, start:stop], (x,), vjp)


def concat_columns(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeMismatchError("concat_columns needs at least one tensor")
    rows = {p.shape[0] for p in parts}
    if len(rows) != 1:
        raise ShapeMismatchError(f"concat_columns: row counts differ {sorted(rows)}")
    bounds = np.cumsum([0] + [p.shape[1] for p in parts])

    def vjp(g: np.ndarray) -> tuple[np.ndarray, ...]:
        return tuple(g[:, bounds[i] : bounds[i + 1]] for i in range(len(parts)))

    value = np.concatenate([p.value for p in parts], axis=1)
    return parts[0].tape.record("concat_columns", value, parts, vjp)


def take_rows(x: Tensor, rows: np.ndarray) -> Tensor:
    rows = np.asarray(rows, dtype=np.int64)
    shape = x.shape

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros(shape, dtype=g.dtype)
        np.add.at(full, rows, g)
        return (full,)

    return x.tape.record("take_rows", x.value[rows], (x,), vjp)


def fill_masked(x: Tensor, rows: np.ndarray, cols: np.ndarray, token: Tensor) -> Tensor:
    """
    Replace ``x[rows][:, cols]`` by a shared token vector.

    Args:
        x: N×p input
        rows: Node indices to mask
        cols: Feature columns replaced on every masked node
        token: Learned values, one per column in ``cols``
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if token.shape != (cols.shape[0],):
        raise ShapeMismatchError(
            f"fill_masked: token {token.shape} does not match {cols.shape[0]} columns"
        )
    block = np.ix_(rows, cols)
    out = x.value.copy()
    out[block] = token.value

    def vjp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        dx = g.copy()
        dx[block] = 0.0
        return dx, g[block].sum(axis=0)

    return x.tape.record("fill_masked", out, (x, token), vjp)


def mse(pred: Tensor, target: np.ndarray, rows: np.ndarray | None = None) -> Tensor:
    """
    Mean squared error against a constant target.

    Args:
        pred: N×p prediction
        target: N×p target (or len(rows)×p when ``rows`` is given)
        rows: Restrict the mean to these prediction rows

    Raises:
        ShapeMismatchError: If the compared shapes differ
    """
    pv = pred.value if rows is None else pred.value[rows]
    target = np.asarray(target, dtype=pred.dtype)
    if pv.shape != target.shape:
        raise ShapeMismatchError(f"mse: prediction {pv.shape} vs target {target.shape}")
    diff = pv - target
    count = diff.size
    shape = pred.shape

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        local = (2.0 / count) * diff * g
        if rows is None:
            return (local,)
        full = np.zeros(shape, dtype=local.dtype)
        np.add.at(full, rows, local)
        return (full,)

    value = np.asarray(np.sum(diff * diff) / count)
    return pred.tape.record("mse", value, (pred,), vjp)


def sum_squares(x: Tensor) -> Tensor:
    xv = x.value

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (2.0 * xv * g,)

    return x.tape.record("sum_squares", np.asarray(np.sum(xv * xv)), (x,), vjp)


def weighted_sum(x: Tensor, weights: np.ndarray) -> Tensor:
    """Scalar ``Σ x ⊙ weights`` for a constant weight array."""
    weights = np.asarray(weights, dtype=x.dtype)
    if weights.shape != x.shape:
        raise ShapeMismatchError(f"weighted_sum: weights {weights.shape} vs {x.shape}")

    def vjp(g: np.ndarray) -> tuple[np.ndarray]:
        return (weights * g,)

    return x.tape.record("weighted_sum", np.asarray(np.sum(x.value * weights)), (x,), vjp)
