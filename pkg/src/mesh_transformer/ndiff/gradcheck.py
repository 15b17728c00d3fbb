"""Central finite-difference verification of tape gradients."""

from __future__ import annotations

import logging
from collections.abc import Callable, Mapping

import numpy as np

from .tensor import Tape, Tensor

logger = logging.getLogger("mesh-transformer.ndiff")

ScalarFn = Callable[[Tape, dict[str, Tensor]], Tensor]


def _evaluate(f: ScalarFn, params: Mapping[str, np.ndarray]) -> float:
    tape = Tape(dtype=np.float64, record=False)
    return float(f(tape, tape.watch_all(params)).value)


def finite_diff_check(
    f: ScalarFn,
    params: Mapping[str, np.ndarray],
    h: float = 1e-5,
    n_coords: int = 200,
    seed: int = 0,
    floor: float = 1e-6,
) -> float:
    """
    Compare tape gradients with central differences in 64-bit precision.

    Args:
        f: Builds a scalar on the given tape from the watched parameters
        params: Named parameter arrays
        h: Finite-difference step
        n_coords: Number of coordinates sampled (all of them when fewer exist)
        seed: Seed of the coordinate sample
        floor: Lower bound on the relative-error denominator

    Returns:
        The maximum relative error |analytic − numeric| / max(|analytic|, |numeric|, floor)
    """
    base = {name: np.array(value, dtype=np.float64, copy=True) for name, value in params.items()}
    tape = Tape(dtype=np.float64)
    out = f(tape, tape.watch_all(base))
    grads = tape.backward(out)

    coords = [(name, i) for name, value in base.items() for i in range(value.size)]
    if not coords:
        return 0.0
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(coords), size=min(n_coords, len(coords)), replace=False)

    worst = 0.0
    worst_coord: tuple[str, int] | None = None
    for pick in picks:
        name, flat = coords[int(pick)]
        original = base[name].reshape(-1)[flat]
        base[name].reshape(-1)[flat] = original + h
        plus = _evaluate(f, base)
        base[name].reshape(-1)[flat] = original - h
        minus = _evaluate(f, base)
        base[name].reshape(-1)[flat] = original

        numeric = (plus - minus) / (2.0 * h)
        analytic = float(grads[name].reshape(-1)[flat])
        error = abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)
        if error > worst:
            worst, worst_coord = error, (name, flat)

    logger.debug(f"Gradient check: max relative error {worst:.3e} at {worst_coord}")
    return worst
