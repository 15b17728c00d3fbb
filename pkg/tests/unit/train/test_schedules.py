"""Tests for learning-rate schedules."""

import math

import pytest

from mesh_transformer.exceptions import StepOutOfRangeError
from mesh_transformer.models.config import ExponentialTail, WarmupCosine
from mesh_transformer.train.schedules import lr_at


@pytest.fixture
def cosine():
    return WarmupCosine(lr_max=1e-3, lr_min=1e-6, warmup_iters=10, total_iters=110)


class TestWarmupCosine:
    def test_warmup_is_linear_from_zero(self, cosine):
        assert lr_at(cosine, 0) == 0.0
        assert lr_at(cosine, 5) == pytest.approx(5e-4)
        assert lr_at(cosine, 10) == pytest.approx(1e-3)

    def test_cosine_reaches_minimum(self, cosine):
        assert lr_at(cosine, 110) == pytest.approx(1e-6)

    def test_cosine_midpoint(self, cosine):
        assert lr_at(cosine, 60) == pytest.approx((1e-3 + 1e-6) / 2)

    def test_monotone_after_warmup(self, cosine):
        values = [lr_at(cosine, s) for s in range(10, 111)]

        assert all(a >= b for a, b in zip(values, values[1:], strict=False))

    def test_warmup_spanning_whole_run(self):
        schedule = WarmupCosine(lr_max=1.0, lr_min=0.1, warmup_iters=4, total_iters=4)

        assert lr_at(schedule, 2) == pytest.approx(0.5)
        assert lr_at(schedule, 4) == 1.0


class TestExponentialTail:
    @pytest.fixture
    def tail(self):
        return ExponentialTail(lr_flat=1e-3, decay_to=1e-5, flat_fraction=0.75, total_iters=100)

    def test_flat_phase(self, tail):
        assert lr_at(tail, 0) == 1e-3
        assert lr_at(tail, 75) == 1e-3

    def test_reaches_target_at_last_step(self, tail):
        assert lr_at(tail, 100) == pytest.approx(1e-5)

    def test_geometric_decay(self, tail):
        """Halfway through the tail the rate is the geometric mean."""
        assert lr_at(tail, 87.5) == pytest.approx(math.sqrt(1e-3 * 1e-5))


class TestStepRange:
    @pytest.mark.parametrize("step", [-1, 111])
    def test_out_of_range(self, cosine, step):
        with pytest.raises(StepOutOfRangeError, match="outside"):
            lr_at(cosine, step)
