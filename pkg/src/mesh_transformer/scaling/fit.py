"""Power-law fits across isoFLOP minima and loss/metric correlations."""

import logging
from collections.abc import Sequence

import numpy as np

from ..exceptions import NonPositiveInputError, TooFewRunsError
from ..models.records import LossMetricCorrelation, PowerLawFit, RunRecord

logger = logging.getLogger("mesh-transformer.scaling")


def fit_power_law(points: Sequence[tuple[float, float]]) -> PowerLawFit:
    """
    Least-squares fit of P* = k·C^a on natural logs.

    Args:
        points: (C, P*) pairs

    Raises:
        TooFewRunsError: If fewer than two points are given
        NonPositiveInputError: If any C or P* is not positive
    """
    if len(points) < 2:
        raise TooFewRunsError(f"A power-law fit needs at least 2 points, got {len(points)}")
    data = np.asarray(points, dtype=np.float64)
    if np.any(data <= 0) or not np.all(np.isfinite(data)):
        raise NonPositiveInputError("Power-law fit inputs must be positive and finite")
    log_c, log_p = np.log(data[:, 0]), np.log(data[:, 1])
    slope, intercept = np.polyfit(log_c, log_p, 1)
    residual = float(np.sqrt(np.mean((log_p - (slope * log_c + intercept)) ** 2)))
    fit = PowerLawFit(
        exponent=float(slope),
        coefficient=float(np.exp(intercept)),
        residual=residual,
        num_points=len(points),
    )
    logger.info(f"Power law: P* = {fit.coefficient:.4g}·C^{fit.exponent:.4f} (rms {residual:.3g})")
    return fit


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if np.std(x) == 0 or np.std(y) == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def loss_metric_correlation(records: Sequence[RunRecord]) -> LossMetricCorrelation:
    """
    Pearson correlation of the all-rollout metric with the final training loss
    and with log FLOPs, over the runs that recorded the metric.

    Raises:
        TooFewRunsError: If fewer than two runs carry an all-rollout metric
    """
    usable = [r for r in records if r.final_all_rollout is not None and r.flop_budget > 0]
    if len(usable) < 2:
        raise TooFewRunsError(
            f"Correlation needs at least 2 runs with an all-rollout metric, got {len(usable)}"
        )
    loss = np.array([r.final_loss for r in usable])
    metric = np.array([r.final_all_rollout for r in usable], dtype=np.float64)
    log_flops = np.log(np.array([r.flop_budget for r in usable]))
    return LossMetricCorrelation(
        loss_vs_metric=_pearson(loss, metric),
        log_flops_vs_metric=_pearson(log_flops, metric),
        num_runs=len(usable),
    )
