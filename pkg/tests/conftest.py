"""
Root pytest configuration file for mesh-transformer tests.

This module provides the fixtures shared across all test modules: small
graphs, trajectories and configurations built by the factories in
``tests.utils.factories``.
"""

import pytest

from mesh_transformer.dataio.dataset import MeshDataset
from mesh_transformer.utils.lifecycle import reset_shutdown
from tests.utils.factories import ConfigFactory, GraphFactory, TrajectoryFactory


def pytest_addoption(parser):
    """Add command-line options for tests."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run slow learning and acceptance tests",
    )


def pytest_collection_modifyitems(config, items):
    """Skip tests marked ``slow`` unless --run-slow is given."""
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ============================================================================
# Process State
# ============================================================================


@pytest.fixture(autouse=True)
def clear_shutdown_request():
    """Every test starts and ends without a pending shutdown request."""
    reset_shutdown()
    yield
    reset_shutdown()


@pytest.fixture
def clean_environment(monkeypatch):
    """Remove every MESH_* variable that changes runtime behavior."""
    for name in (
        "MESH_VERBOSE",
        "MESH_VERY_VERBOSE",
        "MESH_LOGGING_STDOUT",
        "MESH_DEBUG_FINITE",
        "MESH_WORKERS",
        "MESH_PRECISION",
    ):
        monkeypatch.delenv(name, raising=False)


# ============================================================================
# Graph Fixtures
# ============================================================================


@pytest.fixture
def path_graph():
    """A 6-node path 0-1-2-3-4-5 with walls at both ends."""
    return GraphFactory.path(6)


@pytest.fixture
def grid_graph():
    """A 4×4 grid mesh with its border marked as wall."""
    return GraphFactory.grid(4, 4)


@pytest.fixture
def random_graph():
    """A connected random geometric graph on 40 nodes."""
    return GraphFactory.random(40, seed=3)


# ============================================================================
# Trajectory and Dataset Fixtures
# ============================================================================


@pytest.fixture
def grid_trajectory(grid_graph):
    """Five frames of one dynamic and one static field on the grid mesh."""
    return TrajectoryFactory.create(grid_graph, frames=5, seed=1)


@pytest.fixture
def tiny_dataset():
    """Two short trajectories on small grids."""
    return MeshDataset(
        [
            TrajectoryFactory.create(GraphFactory.grid(3, 4), frames=4, seed=10),
            TrajectoryFactory.create(GraphFactory.grid(4, 3), frames=5, seed=11),
        ]
    )


# ============================================================================
# Configuration Fixtures
# ============================================================================


@pytest.fixture
def tiny_model_cfg():
    """d=8, L=2, H=2 model without augmentation."""
    return ConfigFactory.model()


@pytest.fixture
def tiny_train_cfg():
    """Ten warmup-cosine steps at a moderate learning rate."""
    return ConfigFactory.train(total_iters=10)
