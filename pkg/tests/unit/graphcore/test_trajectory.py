"""Tests for NodeFeatures and Trajectory containers."""

import numpy as np
import pytest

from mesh_transformer.exceptions import GraphValidationError, NonFiniteError, ShapeMismatchError
from mesh_transformer.graphcore.trajectory import NodeFeatures, Trajectory
from tests.utils.factories import TrajectoryFactory


class TestNodeFeatures:
    def test_dynamic_columns(self):
        x = NodeFeatures(np.zeros((3, 3)), ("u", "v", "p"), (True, True, False))

        assert x.dynamic_columns.tolist() == [0, 1]
        assert x.num_nodes == 3
        assert x.width == 3

    def test_metadata_must_match_columns(self):
        with pytest.raises(ShapeMismatchError):
            NodeFeatures(np.zeros((3, 2)), ("u",), (True,))

    def test_non_finite_values_rejected(self):
        with pytest.raises(NonFiniteError):
            NodeFeatures(np.array([[np.nan]]), ("u",), (True,))


class TestTrajectory:
    def test_layout(self, grid_trajectory):
        assert grid_trajectory.num_frames == 5
        assert grid_trajectory.num_nodes == 16
        assert grid_trajectory.dynamic_columns.tolist() == [0]
        assert grid_trajectory.static_columns.tolist() == [1]
        assert grid_trajectory.dynamic(2).shape == (16, 1)

    def test_static_columns_repeat(self, grid_trajectory):
        """The factory keeps static fields identical in every frame."""
        static = grid_trajectory.fields[:, :, 1]

        assert np.array_equal(static, np.broadcast_to(static[0], static.shape))

    def test_node_count_must_match_graph(self, grid_graph):
        with pytest.raises(ShapeMismatchError, match="graph has 16"):
            Trajectory(grid_graph, np.zeros((2, 15, 1)), 0.1, ("u",), (True,))

    def test_history_depth_is_zero_or_one(self, grid_graph):
        with pytest.raises(GraphValidationError):
            Trajectory(grid_graph, np.zeros((2, 16, 1)), 0.1, ("u",), (True,), history_depth=2)

    def test_slice_keeps_metadata(self, grid_graph):
        traj = TrajectoryFactory.create(grid_graph, frames=6, history_depth=1)
        part = traj.slice(slice(2, 4))

        assert part.num_frames == 2
        assert part.history_depth == 1
        assert np.array_equal(part.fields[0], traj.fields[2])
