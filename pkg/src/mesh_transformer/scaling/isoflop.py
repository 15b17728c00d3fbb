"""Compute-optimal model size at a fixed FLOPs budget."""

import logging

import numpy as np

from ..exceptions import TooFewRunsError
from ..models.constants import MIN_RUNS_PER_GROUP
from ..models.records import IsoFlopGroup, IsoFlopMinimum

logger = logging.getLogger("mesh-transformer.scaling")


def fit_log_parabola(params: np.ndarray, losses: np.ndarray) -> tuple[float, float, float]:
    """Quadratic coefficients (a, b, c) of loss = a·x² + b·x + c with x = log10(P)."""
    a, b, c = np.polyfit(np.log10(params), losses, 2)
    return float(a), float(b), float(c)


def isoflop_minimum(group: IsoFlopGroup, refine: bool = False) -> IsoFlopMinimum:
    """
    Loss-minimizing parameter count of one isoFLOP group.

    The default is the argmin over the runs. With ``refine``, a parabola in
    log10(P) is fitted to the three lowest-loss runs and its vertex is returned
    when the parabola opens upward and the vertex lies inside the sampled P range.

    Raises:
        TooFewRunsError: If the group has fewer than three runs
    """
    if len(group.runs) < MIN_RUNS_PER_GROUP:
        raise TooFewRunsError(
            f"Budget {group.budget:.3g} has {len(group.runs)} runs, "
            f"need at least {MIN_RUNS_PER_GROUP}"
        )
    params = np.array([p for p, _ in group.runs], dtype=np.float64)
    losses = np.array([loss for _, loss in group.runs], dtype=np.float64)
    best = int(np.argmin(losses))
    argmin = IsoFlopMinimum(
        budget=group.budget, param_count=float(params[best]), loss=float(losses[best])
    )
    if not refine:
        return argmin

    lowest = np.argsort(losses, kind="stable")[:3]
    if np.unique(params[lowest]).shape[0] < 3:
        return argmin
    a, b, c = fit_log_parabola(params[lowest], losses[lowest])
    if a <= 0:
        logger.debug(f"Budget {group.budget:.3g}: parabola opens downward, using argmin")
        return argmin
    vertex = -b / (2 * a)
    lo, hi = np.log10(params.min()), np.log10(params.max())
    if not lo <= vertex <= hi:
        logger.debug(f"Budget {group.budget:.3g}: vertex 10^{vertex:.3f} outside sampled range")
        return argmin
    return IsoFlopMinimum(
        budget=group.budget,
        param_count=float(10**vertex),
        loss=float(a * vertex**2 + b * vertex + c),
        refined=True,
    )
