"""Tests for the synthetic heat-diffusion generator."""

import numpy as np
import pytest

from mesh_transformer.dataio.heat import (
    combinatorial_laplacian,
    gen_heat_dataset,
    knn_graph,
    simulate_heat,
    stable_dt,
)
from mesh_transformer.exceptions import (
    ConfigurationError,
    DegenerateGeometryError,
    GraphValidationError,
    UnstableTimestepError,
)
from mesh_transformer.graphcore.graph import NodeType


@pytest.fixture(scope="module")
def heat_trajectory():
    (traj,) = gen_heat_dataset(n_points=60, steps=30, seed=0)
    return traj


class TestGenHeatDataset:
    """Tests for gen_heat_dataset."""

    def test_layout(self, heat_trajectory):
        assert heat_trajectory.fields.shape == (30, 60, 1)
        assert heat_trajectory.field_names == ("temperature",)
        assert heat_trajectory.dynamic_mask == (True,)
        assert heat_trajectory.graph.nodes_of_type(NodeType.WALL).shape[0] >= 3

    def test_total_heat_conserved(self, heat_trajectory):
        totals = heat_trajectory.fields[:, :, 0].sum(axis=1)

        assert np.allclose(totals, totals[0], rtol=1e-4)

    def test_maximum_never_increases(self, heat_trajectory):
        maxima = heat_trajectory.fields[:, :, 0].max(axis=1)

        assert np.all(np.diff(maxima) <= 1e-12)

    def test_deterministic_for_seed(self):
        first = gen_heat_dataset(n_points=30, steps=5, seed=4, num_trajectories=2)
        second = gen_heat_dataset(n_points=30, steps=5, seed=4, num_trajectories=2)

        for a, b in zip(first, second, strict=True):
            assert a.graph == b.graph
            assert np.array_equal(a.fields, b.fields)
        assert not np.array_equal(first[0].fields, first[1].fields)

    def test_zero_diffusivity_keeps_frames(self):
        (traj,) = gen_heat_dataset(n_points=30, steps=4, diffusivity=0.0, seed=1)

        assert np.all(traj.fields == traj.fields[0])

    def test_unstable_dt(self):
        with pytest.raises(UnstableTimestepError, match="violates"):
            gen_heat_dataset(n_points=30, steps=4, dt=10.0)

    def test_disconnected_geometry(self):
        with pytest.raises(DegenerateGeometryError):
            gen_heat_dataset(n_points=40, steps=2, k_neighbors=1, max_retries=2)

    @pytest.mark.parametrize(
        "kwargs", [{"n_points": 3}, {"steps": 1}, {"diffusivity": -1.0}]
    )
    def test_invalid_sizes(self, kwargs):
        args = {"n_points": 30, "steps": 4, **kwargs}

        with pytest.raises(ConfigurationError):
            gen_heat_dataset(**args)


class TestHeatHelpers:
    def test_laplacian_rows_sum_to_zero(self):
        points = np.random.default_rng(0).uniform(size=(25, 2))
        g = knn_graph(points, 4)

        laplacian = combinatorial_laplacian(g)

        assert np.allclose(np.asarray(laplacian.sum(axis=1)).ravel(), 0.0)
        assert (laplacian != laplacian.T).nnz == 0

    def test_too_few_points_for_a_hull(self):
        with pytest.raises(GraphValidationError, match="at least 3"):
            knn_graph(np.array([[0.0, 0.0], [1.0, 0.0]]), 1)

    def test_collinear_points_rejected(self):
        points = np.stack([np.linspace(0.0, 1.0, 5), np.zeros(5)], axis=1)

        with pytest.raises(GraphValidationError, match="degenerate"):
            knn_graph(points, 2)

    def test_default_dt_is_stable(self):
        g = knn_graph(np.random.default_rng(1).uniform(size=(25, 2)), 4)
        deg_max = np.bincount(g.senders).max()

        assert stable_dt(g, 2.0) * 2.0 * deg_max < 0.5

    def test_first_frame_is_initial_condition(self):
        g = knn_graph(np.random.default_rng(2).uniform(size=(10, 2)), 3)
        u0 = np.arange(10.0)

        frames = simulate_heat(g, u0, steps=3, diffusivity=1.0, dt=stable_dt(g, 1.0))

        assert frames.shape == (3, 10)
        assert np.array_equal(frames[0], u0)
