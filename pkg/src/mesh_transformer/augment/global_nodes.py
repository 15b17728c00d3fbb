"""Global attention nodes connected to every node of the mask."""

import math
from collections.abc import Iterable

import numpy as np

from ..exceptions import MaskError
from ..graphcore.graph import Graph, NodeType
from ..graphcore.mask import SparseMask
from ..models.config import AugmentSpec


def select_global_nodes(
    g: Graph,
    node_types: Iterable[str | NodeType],
    fraction: float,
    seed: int | np.random.Generator,
) -> np.ndarray:
    """
    Sample ``ceil(fraction · matches)`` nodes among those of the given types.

    Returns:
        Sorted node indices; empty when nothing matches or the fraction is 0
    """
    if not 0.0 <= fraction <= 1.0:
        raise MaskError(f"Global node fraction must lie in [0, 1], got {fraction}")
    types = [t if isinstance(t, NodeType) else NodeType.from_name(t) for t in node_types]
    matches = g.nodes_of_type(*types)
    if fraction == 0.0 or matches.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    count = math.ceil(fraction * matches.shape[0])
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return np.sort(rng.choice(matches, size=count, replace=False))


def add_global(
    m: SparseMask,
    g: Graph,
    spec: AugmentSpec,
    nodes: np.ndarray | None = None,
) -> SparseMask:
    """
    Connect sampled global nodes symmetrically to every other node.

    Args:
        m: Square mask over the nodes of ``g``
        g: Graph providing node types for selection
        spec: Supplies the node-type selector, fraction and sampling seed
        nodes: Explicit global nodes, bypassing the selector

    Returns:
        The mask with rows and columns of every global node filled
    """
    if m.num_rows != g.num_nodes or not m.is_square:
        raise MaskError(f"Mask of shape {m.shape} does not cover {g.num_nodes} nodes")
    if nodes is None:
        nodes = select_global_nodes(
            g, spec.global_node_types, spec.global_fraction, spec.global_seed
        )
    nodes = np.asarray(nodes, dtype=np.int64)
    if nodes.shape[0] == 0:
        return m

    n = g.num_nodes
    hubs = np.repeat(nodes, n)
    others = np.tile(np.arange(n), nodes.shape[0])
    off_diagonal = hubs != others
    hubs, others = hubs[off_diagonal], others[off_diagonal]
    spokes = SparseMask.from_pairs(
        np.concatenate([hubs, others]), np.concatenate([others, hubs]), m.shape
    )
    return m.union(spokes)
