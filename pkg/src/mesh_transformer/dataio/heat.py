"""Synthetic heat-diffusion trajectories on random k-NN meshes."""

import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError, cKDTree

from ..exceptions import (
    ConfigurationError,
    DegenerateGeometryError,
    GraphValidationError,
    UnstableTimestepError,
)
from ..graphcore.graph import Graph, NodeType, build_graph
from ..graphcore.trajectory import Trajectory

logger = logging.getLogger("mesh-transformer.dataio")

STABILITY_LIMIT = 0.5
DEFAULT_DT_FACTOR = 0.4
DEFAULT_MAX_RETRIES = 10
FIELD_NAMES = ("temperature",)


def knn_graph(points: np.ndarray, k_neighbors: int) -> Graph:
    """
    Symmetrized k-nearest-neighbor graph; convex hull points are walls.

    Raises:
        GraphValidationError: If the points span no 2-D hull
    """
    if points.shape[0] < 3:
        raise GraphValidationError(f"A hull needs at least 3 points, got {points.shape[0]}")
    try:
        hull = ConvexHull(points)
    except QhullError as e:
        raise GraphValidationError(f"Points are degenerate (collinear or coincident): {e}") from e
    tree = cKDTree(points)
    _, neighbors = tree.query(points, k=k_neighbors + 1)
    senders = np.repeat(np.arange(points.shape[0]), k_neighbors)
    receivers = neighbors[:, 1:].reshape(-1)
    node_type = np.full(points.shape[0], int(NodeType.NORMAL))
    node_type[hull.vertices] = int(NodeType.WALL)
    return build_graph(points, node_type, np.stack([senders, receivers], axis=1))


def combinatorial_laplacian(g: Graph) -> sp.csr_matrix:
    """L = D − A of the graph."""
    n = g.num_nodes
    adjacency = sp.csr_matrix(
        (np.ones(g.num_edges), (g.senders, g.receivers)), shape=(n, n)
    )
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    return sp.diags(degree) - adjacency


def stable_dt(g: Graph, diffusivity: float, dt: float | None = None) -> float:
    """
    Explicit-Euler timestep satisfying dt·κ·deg_max < 0.5.

    Raises:
        UnstableTimestepError: If an explicit ``dt`` violates the bound
    """
    deg_max = int(np.bincount(g.senders, minlength=g.num_nodes).max()) if g.num_edges else 0
    bound = diffusivity * deg_max
    if dt is None:
        return DEFAULT_DT_FACTOR / bound if bound > 0 else 1.0
    if dt <= 0 or dt * bound >= STABILITY_LIMIT:
        raise UnstableTimestepError(
            f"dt={dt} violates dt·κ·deg_max < {STABILITY_LIMIT} (κ·deg_max={bound})"
        )
    return dt


def gaussian_bumps(points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sum of 1 to 3 random Gaussian bumps evaluated at ``points``."""
    count = int(rng.integers(1, 4))
    field = np.zeros(points.shape[0])
    for _ in range(count):
        center = rng.uniform(0.0, 1.0, size=2)
        width = rng.uniform(0.05, 0.2)
        amplitude = rng.uniform(0.5, 1.5)
        dist2 = np.sum((points - center) ** 2, axis=1)
        field += amplitude * np.exp(-dist2 / (2.0 * width * width))
    return field


def simulate_heat(
    g: Graph,
    u0: np.ndarray,
    steps: int,
    diffusivity: float,
    dt: float,
) -> np.ndarray:
    """Frames u_{t+1} = u_t − dt·κ·L·u_t, returned as T×N (T = steps)."""
    laplacian = combinatorial_laplacian(g)
    frames = np.empty((steps, g.num_nodes))
    frames[0] = u0
    for t in range(1, steps):
        frames[t] = frames[t - 1] - dt * diffusivity * (laplacian @ frames[t - 1])
    return frames


def _generate_one(
    n_points: int,
    steps: int,
    diffusivity: float,
    k_neighbors: int,
    seed: int,
    index: int,
    dt: float | None,
    max_retries: int,
) -> Trajectory:
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, index, attempt])
        points = rng.uniform(0.0, 1.0, size=(n_points, 2))
        g = knn_graph(points, k_neighbors)
        n_components, _ = connected_components(
            combinatorial_laplacian(g), directed=False
        )
        if n_components == 1:
            step = stable_dt(g, diffusivity, dt)
            frames = simulate_heat(g, gaussian_bumps(points, rng), steps, diffusivity, step)
            return Trajectory(
                graph=g,
                fields=frames[:, :, None],
                dt=step,
                field_names=FIELD_NAMES,
                dynamic_mask=(True,),
                history_depth=0,
            )
        logger.debug(
            f"Trajectory {index} attempt {attempt}: k-NN graph has {n_components} components"
        )
    raise DegenerateGeometryError(
        f"No connected {k_neighbors}-NN graph on {n_points} points after {max_retries} attempts"
    )


def gen_heat_dataset(
    n_points: int,
    steps: int,
    diffusivity: float = 1.0,
    k_neighbors: int = 6,
    seed: int = 0,
    num_trajectories: int = 1,
    dt: float | None = None,
    max_retries: int = DEFAULT_MAX_RETRIES,
    workers: int = 1,
) -> list[Trajectory]:
    """
    Generate heat-diffusion trajectories on random point clouds in the unit square.

    Args:
        n_points: Nodes per mesh (at least k_neighbors + 1)
        steps: Frames per trajectory T (at least 2)
        diffusivity: κ ≥ 0
        k_neighbors: Neighbors per node before symmetrization
        seed: Base seed; trajectory i is deterministic in (seed, i)
        num_trajectories: Number of trajectories
        dt: Explicit timestep, checked against the stability bound
        max_retries: Resampling attempts for disconnected graphs
        workers: Worker processes

    Raises:
        ConfigurationError: If the sizes are out of range
        DegenerateGeometryError: If no connected graph is found within the retries
        UnstableTimestepError: If ``dt`` violates the stability bound
    """
    if n_points < k_neighbors + 1:
        raise ConfigurationError(
            f"n_points={n_points} must be at least k_neighbors+1={k_neighbors + 1}"
        )
    if steps < 2:
        raise ConfigurationError(f"Trajectories need at least 2 frames, got {steps}")
    if diffusivity < 0:
        raise ConfigurationError(f"Diffusivity must be non-negative, got {diffusivity}")

    args = [
        (n_points, steps, diffusivity, k_neighbors, seed, i, dt, max_retries)
        for i in range(num_trajectories)
    ]
    if workers > 1 and num_trajectories > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(_generate_one, *zip(*args, strict=True)))
    else:
        trajectories = [_generate_one(*a) for a in args]
    logger.info(
        f"Generated {num_trajectories} heat trajectories "
        f"(N={n_points}, T={steps}, κ={diffusivity})"
    )
    return trajectories
