"""Tests for the result records."""

import pytest
from pydantic import ValidationError

from mesh_transformer.models.records import (
    EvalReport,
    IsoFlopGroup,
    MetricValues,
    PowerLawFit,
    RunRecord,
    TrajectoryMetrics,
)


def _record(params: int, nodes: int, **overrides) -> RunRecord:
    return RunRecord(
        flop_budget=overrides.pop("flop_budget", 6.0 * params * nodes),
        param_count=params,
        training_nodes=nodes,
        steps=10,
        final_loss=0.1,
        **overrides,
    )


class TestRunRecord:
    def test_flops_match_6pd(self):
        record = _record(1000, 500)

        assert record.flop_budget == 3e6

    def test_flops_off_by_more_than_one_percent(self):
        with pytest.raises(ValidationError, match="6PD"):
            _record(1000, 500, flop_budget=3.1e6)

    def test_simplified_dict_drops_unset(self):
        data = _record(1000, 500).to_simplified_dict()

        assert "final_all_rollout" not in data
        assert data["param_count"] == 1000


class TestIsoFlopGroup:
    def test_tolerance(self):
        records = [
            _record(1000, 1000),
            _record(2000, 510),
            _record(4000, 300),
        ]

        group = IsoFlopGroup.from_records(6e6, records, tolerance=0.02)

        assert group.runs == ((1000.0, 0.1), (2000.0, 0.1))


class TestMetrics:
    def test_display_scale(self):
        values = MetricValues.scaled(0.002, 0.05)

        assert values.one_step_x1e3 == pytest.approx(2.0)
        assert values.all_rollout_x1e3 == pytest.approx(50.0)

    def test_report_means(self):
        rows = [
            TrajectoryMetrics(name="a", **MetricValues.scaled(1.0, 3.0).model_dump()),
            TrajectoryMetrics(name="b", **MetricValues.scaled(2.0, 5.0).model_dump()),
        ]

        report = EvalReport.from_trajectories(rows, root=True)

        assert report.aggregate.one_step == pytest.approx(1.5)
        assert report.aggregate.all_rollout == pytest.approx(4.0)
        assert report.root
        assert "persistence" not in report.to_simplified_dict()


class TestPowerLawFit:
    def test_predict(self):
        fit = PowerLawFit(exponent=0.5, coefficient=2.0, residual=0.0, num_points=3)

        assert fit.predict(1e6) == pytest.approx(2000.0)
