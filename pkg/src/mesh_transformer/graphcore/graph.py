"""Mesh graphs with validated construction."""

from __future__ import annotations

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any

import numpy as np

from ..exceptions import GraphValidationError, IndexOutOfRangeError, RaggedCoordsError

logger = logging.getLogger("mesh-transformer.graphcore")


class NodeType(IntEnum):
    """Mesh node categories; the integer values are the on-disk encoding."""

    NORMAL = 0
    INFLOW = 1
    OUTFLOW = 2
    WALL = 3
    OBSTACLE = 4

    @classmethod
    def from_name(cls, name: str) -> NodeType:
        try:
            return cls[name.upper()]
        except KeyError:
            raise GraphValidationError(f"Unknown node type '{name}'") from None


NUM_NODE_TYPES = len(NodeType)


def _node_type(value: Any) -> NodeType:
    if isinstance(value, str):
        return NodeType.from_name(value)
    try:
        return NodeType(int(value))
    except ValueError:
        raise GraphValidationError(f"Unknown node type {value}") from None


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected mesh graph G = (V, E).

    Edges are stored as directed (sender, receiver) pairs, symmetrized,
    deduplicated, free of self-loops and sorted lexicographically.
    """

    coords: np.ndarray
    node_type: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray
    _fingerprint: str = field(default="", repr=False)

    @property
    def num_nodes(self) -> int:
        return int(self.coords.shape[0])

    @property
    def num_edges(self) -> int:
        """Number of directed edges N^e (twice the undirected count)."""
        return int(self.senders.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.senders.tolist(), self.receivers.tolist(), strict=True))

    @property
    def edge_pairs(self) -> np.ndarray:
        return np.stack([self.senders, self.receivers], axis=1)

    @property
    def fingerprint(self) -> str:
        """Stable content hash, used as a cache key for per-graph state."""
        return self._fingerprint

    def nodes_of_type(self, *types: NodeType) -> np.ndarray:
        """Indices of nodes whose type is one of ``types``."""
        if not types:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(np.isin(self.node_type, [int(t) for t in types]))

    def permute(self, perm: Sequence[int] | np.ndarray) -> Graph:
        """Relabel nodes so that new node ``k`` is old node ``perm[k]``."""
        perm = np.asarray(perm, dtype=np.int64)
        inverse = np.empty_like(perm)
        inverse[perm] = np.arange(perm.shape[0])
        return build_graph(
            self.coords[perm],
            self.node_type[perm],
            np.stack([inverse[self.senders], inverse[self.receivers]], axis=1),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.coords, other.coords)
            and np.array_equal(self.node_type, other.node_type)
            and np.array_equal(self.senders, other.senders)
            and np.array_equal(self.receivers, other.receivers)
        )

    def __hash__(self) -> int:
        return hash(self._fingerprint)


def _as_coords(coords: Any) -> np.ndarray:
    if isinstance(coords, np.ndarray):
        array = coords
    else:
        rows = list(coords)
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise RaggedCoordsError(
                f"Coordinate rows have differing lengths: {sorted(widths)}"
            )
        array = np.asarray(rows, dtype=np.float64)
    if array.ndim == 1 and array.shape[0] == 0:
        array = array.reshape(0, 2)
    if array.ndim != 2:
        raise RaggedCoordsError(f"Coordinates must be N×D, got shape {array.shape}")
    if array.shape[1] not in (2, 3):
        raise RaggedCoordsError(f"Coordinates must be 2D or 3D, got D={array.shape[1]}")
    return np.array(array, dtype=np.float64, copy=True)


def build_graph(
    coords: Any,
    node_types: Any,
    edge_pairs: Any,
) -> Graph:
    """
    Build a validated, symmetrized Graph.

    Args:
        coords: N×D coordinates (D in {2, 3})
        node_types: N node types (NodeType members, ints or names)
        edge_pairs: iterable of (sender, receiver) index pairs

    Returns:
        A Graph whose edge set is symmetric, duplicate-free and without self-loops

    Raises:
        RaggedCoordsError: If the coordinates are not rectangular
        GraphValidationError: If a node type is unknown or the counts differ
        IndexOutOfRangeError: If an edge index is outside [0, N)
    """
    xy = _as_coords(coords)
    num_nodes = xy.shape[0]

    types = np.array([_node_type(t) for t in node_types], dtype=np.int64).reshape(-1)
    if types.shape[0] != num_nodes:
        raise GraphValidationError(
            f"Expected {num_nodes} node types, got {types.shape[0]}"
        )

    pairs = np.asarray(edge_pairs, dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise GraphValidationError(f"Edges must be pairs, got shape {pairs.shape}")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= num_nodes):
        bad = pairs[(pairs < 0).any(axis=1) | (pairs >= num_nodes).any(axis=1)][0]
        raise IndexOutOfRangeError(
            f"Edge ({bad[0]}, {bad[1]}) out of range for N={num_nodes}"
        )

    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    both = np.concatenate([pairs, pairs[:, ::-1]], axis=0)
    both = np.unique(both, axis=0) if both.shape[0] else both

    digest = hashlib.blake2b(digest_size=16)
    for array in (xy, types, both):
        digest.update(np.ascontiguousarray(array).tobytes())
        digest.update(str(array.shape).encode())

    return Graph(
        coords=_readonly(xy),
        node_type=_readonly(types),
        senders=_readonly(np.ascontiguousarray(both[:, 0])),
        receivers=_readonly(np.ascontiguousarray(both[:, 1])),
        _fingerprint=digest.hexdigest(),
    )


def decompose(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a graph into the (coords, node_types, edge_pairs) that rebuild it."""
    return g.coords.copy(), g.node_type.copy(), g.edge_pairs.copy()
