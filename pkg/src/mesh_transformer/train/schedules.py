"""Learning-rate schedules."""

import math

from ..exceptions import StepOutOfRangeError
from ..models.config import ExponentialTail, Schedule, WarmupCosine


def _cosine_anneal(x: float, min_y: float, max_y: float) -> float:
    """cos on [0, π] stretched to the domain [0, 1] and range [min_y, max_y]."""
    x = min(max(x, 0.0), 1.0)
    return min_y + (max_y - min_y) * (1 + math.cos(x * math.pi)) / 2


def _warmup_cosine(schedule: WarmupCosine, step: int) -> float:
    warmup, total = schedule.warmup_iters, schedule.total_iters
    if step < warmup:
        return schedule.lr_max * step / warmup
    if total == warmup:
        return schedule.lr_max
    return _cosine_anneal((step - warmup) / (total - warmup), schedule.lr_min, schedule.lr_max)


def _exponential_tail(schedule: ExponentialTail, step: int) -> float:
    flat_end = schedule.flat_fraction * schedule.total_iters
    if step <= flat_end:
        return schedule.lr_flat
    progress = (step - flat_end) / (schedule.total_iters - flat_end)
    return schedule.lr_flat * (schedule.decay_to / schedule.lr_flat) ** progress


def lr_at(schedule: Schedule, step: int) -> float:
    """
    Learning rate at ``step``.

    Raises:
        StepOutOfRangeError: If step lies outside [0, total_iters]
    """
    if step < 0 or step > schedule.total_iters:
        raise StepOutOfRangeError(
            f"Step {step} is outside the schedule range [0, {schedule.total_iters}]"
        )
    if isinstance(schedule, WarmupCosine):
        return _warmup_cosine(schedule, step)
    return _exponential_tail(schedule, step)
