"""Adjacency augmentations, head mask plans and positional encodings."""

from .builder import MaskBuilder, StaticMasks, augment_stats
from .dilation import dilate, khop_union
from .global_nodes import add_global, select_global_nodes
from .plan import HeadMaskPlan, head_mask_plan
from .positional import (
    laplacian_eigenvectors,
    normalized_laplacian,
    positional_encoding,
    random_walk_encoding,
)
from .random_edges import add_random_edges, undirected_edge_count

__all__ = [
    "HeadMaskPlan",
    "MaskBuilder",
    "StaticMasks",
    "add_global",
    "add_random_edges",
    "augment_stats",
    "dilate",
    "head_mask_plan",
    "khop_union",
    "laplacian_eigenvectors",
    "normalized_laplacian",
    "positional_encoding",
    "random_walk_encoding",
    "select_global_nodes",
    "undirected_edge_count",
]
