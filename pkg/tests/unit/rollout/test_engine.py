"""Tests for autoregressive rollout."""

import numpy as np
import pytest

from mesh_transformer.exceptions import HorizonExceededError, ShapeMismatchError
from mesh_transformer.graphcore.graph import NodeType
from mesh_transformer.rollout import PersistenceModel, apply_prediction, free_nodes, rollout
from tests.utils.factories import GraphFactory, TrajectoryFactory


class ConstantDelta:
    """Adds a fixed value to every dynamic field per step."""

    target_kind = "delta"

    def __init__(self, value: float) -> None:
        self.value = value
        self.calls: list[int | None] = []

    def predict(self, traj, state, prev_state=None, t=None, rng=None):
        self.calls.append(t)
        return np.full((traj.num_nodes, traj.num_dynamic), self.value)


class WrongWidth:
    target_kind = "delta"

    def predict(self, traj, state, prev_state=None, t=None, rng=None):
        return np.zeros((traj.num_nodes, traj.num_dynamic + 1))


@pytest.fixture
def inflow_trajectory():
    return TrajectoryFactory.create(GraphFactory.grid(3, 4, inflow_column=True), frames=6, seed=2)


class TestRollout:
    """Tests for rollout."""

    def test_shape_and_start_frame(self, grid_trajectory):
        frames = rollout(PersistenceModel(), grid_trajectory, start_t=1, steps=2)

        assert frames.shape == (3, 16, 2)
        assert np.array_equal(frames[0], grid_trajectory.fields[1])

    def test_persistence_repeats_start(self, grid_trajectory):
        frames = rollout(PersistenceModel(), grid_trajectory)

        assert np.allclose(frames[:, :, 0], grid_trajectory.fields[0][:, 0])

    def test_static_fields_follow_ground_truth(self, grid_trajectory):
        frames = rollout(ConstantDelta(1.0), grid_trajectory)

        assert np.array_equal(frames[:, :, 1], grid_trajectory.fields[:, :, 1])

    def test_deltas_accumulate(self, grid_trajectory):
        model = ConstantDelta(0.5)

        frames = rollout(model, grid_trajectory, steps=3)

        assert np.allclose(frames[3, :, 0], grid_trajectory.fields[0][:, 0] + 1.5)
        assert model.calls == [0, 1, 2]

    def test_absolute_mode(self, grid_trajectory):
        frames = rollout(ConstantDelta(2.0), grid_trajectory, steps=2, mode="absolute")

        assert np.all(frames[1:, :, 0] == 2.0)

    def test_forced_nodes_follow_ground_truth(self, inflow_trajectory):
        inflow = inflow_trajectory.graph.nodes_of_type(NodeType.INFLOW)

        frames = rollout(ConstantDelta(1.0), inflow_trajectory)

        assert inflow.shape[0] > 0
        assert np.array_equal(frames[:, inflow, 0], inflow_trajectory.fields[:, inflow, 0])

    def test_zero_steps(self, grid_trajectory):
        frames = rollout(ConstantDelta(1.0), grid_trajectory, start_t=4, steps=0)

        assert frames.shape == (1, 16, 2)

    @pytest.mark.parametrize(("start_t", "steps"), [(0, 5), (3, 2), (-1, 1)])
    def test_horizon_exceeded(self, grid_trajectory, start_t, steps):
        with pytest.raises(HorizonExceededError):
            rollout(PersistenceModel(), grid_trajectory, start_t=start_t, steps=steps)

    def test_prediction_shape_checked(self, grid_trajectory):
        with pytest.raises(ShapeMismatchError, match="predicted"):
            rollout(WrongWidth(), grid_trajectory, steps=1)


class TestHelpers:
    def test_apply_prediction_modes(self):
        current = np.ones((2, 1))
        prediction = np.full((2, 1), 3.0)

        assert np.all(apply_prediction(current, prediction, "delta") == 4.0)
        assert np.all(apply_prediction(current, prediction, "absolute") == 3.0)

    def test_free_nodes_exclude_forced(self, inflow_trajectory):
        free = free_nodes(inflow_trajectory, ["inflow"])
        inflow = inflow_trajectory.graph.nodes_of_type(NodeType.INFLOW)

        assert np.intersect1d(free, inflow).size == 0
        assert free.shape[0] + inflow.shape[0] == inflow_trajectory.num_nodes
