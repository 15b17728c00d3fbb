"""Graph and sparse-mask data structures."""

from .graph import NUM_NODE_TYPES, Graph, NodeType, build_graph, decompose
from .mask import SparseMask, adjacency_mask, degree_stats
from .trajectory import NodeFeatures, Trajectory

__all__ = [
    "NUM_NODE_TYPES",
    "Graph",
    "NodeFeatures",
    "NodeType",
    "SparseMask",
    "Trajectory",
    "adjacency_mask",
    "build_graph",
    "decompose",
    "degree_stats",
]
