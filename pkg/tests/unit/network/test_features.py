"""Tests for encoder input features and normalizers."""

import numpy as np
import pytest

from mesh_transformer.exceptions import ShapeMismatchError
from mesh_transformer.network.features import build_inputs, feature_width, history_inputs
from mesh_transformer.network.normalizer import Normalizer
from tests.utils.factories import TrajectoryFactory


class TestBuildInputs:
    """Tests for build_inputs."""

    def test_width_without_history(self, grid_trajectory):
        inputs = build_inputs(grid_trajectory, grid_trajectory.fields[0])

        assert inputs.shape == (16, feature_width(2, 1, 0))
        assert feature_width(2, 1, 0) == 7

    def test_node_type_one_hot(self, grid_trajectory):
        inputs = build_inputs(grid_trajectory, grid_trajectory.fields[0])
        one_hot = inputs[:, 2:]

        assert np.all(one_hot.sum(axis=1) == 1.0)
        # corner is a wall, the centre is normal
        assert one_hot[0].tolist() == [0, 0, 0, 1, 0]
        assert one_hot[5].tolist() == [1, 0, 0, 0, 0]

    def test_history_differences(self, grid_graph):
        traj = TrajectoryFactory.create(grid_graph, frames=3, history_depth=1)
        state, prev = history_inputs(traj, 2)

        inputs = build_inputs(traj, state, prev)

        assert inputs.shape == (16, feature_width(2, 1, 1))
        assert np.allclose(inputs[:, 2], traj.fields[2][:, 0] - traj.fields[1][:, 0])

    def test_first_frame_history_is_zero(self, grid_graph):
        traj = TrajectoryFactory.create(grid_graph, frames=3, history_depth=1)
        state, prev = history_inputs(traj, 0)

        assert prev is None
        assert np.all(build_inputs(traj, state, prev)[:, 2] == 0.0)

    def test_state_shape_mismatch(self, grid_trajectory):
        with pytest.raises(ShapeMismatchError):
            build_inputs(grid_trajectory, np.zeros((16, 3)))


class TestNormalizer:
    """Tests for Normalizer."""

    def test_statistics_over_all_rows(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(3.0, 2.0, size=(50, 2)), rng.normal(3.0, 2.0, size=(70, 2))
        norm = Normalizer(2)

        norm.accumulate(a)
        norm.accumulate(b)
        stacked = np.concatenate([a, b])

        assert np.allclose(norm.mean, stacked.mean(axis=0))
        assert np.allclose(norm.std, stacked.std(axis=0))

    def test_constant_column_keeps_floor(self):
        norm = Normalizer(1)
        norm.accumulate(np.full((5, 1), 4.0))

        assert norm.std[0] == pytest.approx(1e-8)
        assert np.all(np.isfinite(norm.normalize(np.full((2, 1), 4.0))))

    def test_denormalize_inverts(self):
        norm = Normalizer(3)
        norm.accumulate(np.random.default_rng(1).normal(size=(20, 3)))
        x = np.random.default_rng(2).normal(size=(4, 3))

        assert np.allclose(norm.denormalize(norm.normalize(x)), x)

    def test_identity_before_accumulation(self):
        norm = Normalizer.identity(2)
        x = np.array([[1.0, -2.0]])

        assert np.array_equal(norm.normalize(x), x)

    def test_dict_round_trip(self):
        norm = Normalizer(2)
        norm.accumulate(np.arange(6.0).reshape(3, 2))

        restored = Normalizer.from_dict(norm.to_dict())

        assert restored.count == 3
        assert np.allclose(restored.mean, norm.mean)
        assert np.allclose(restored.std, norm.std)
