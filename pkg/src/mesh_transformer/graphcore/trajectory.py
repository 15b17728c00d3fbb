"""Per-node field containers: single-frame features and whole trajectories."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..exceptions import GraphValidationError, NonFiniteError, ShapeMismatchError
from .graph import Graph


@dataclass(frozen=True)
class NodeFeatures:
    """An N×p feature matrix with named columns."""

    values: np.ndarray
    field_names: tuple[str, ...]
    dynamic_mask: tuple[bool, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ShapeMismatchError(f"Node features must be N×p, got {values.shape}")
        if len(self.field_names) != values.shape[1]:
            raise ShapeMismatchError(
                f"{len(self.field_names)} field names for {values.shape[1]} columns"
            )
        if len(self.dynamic_mask) != values.shape[1]:
            raise ShapeMismatchError(
                f"{len(self.dynamic_mask)} dynamic flags for {values.shape[1]} columns"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("Node features contain NaN or Inf")
        object.__setattr__(self, "field_names", tuple(self.field_names))
        object.__setattr__(self, "dynamic_mask", tuple(bool(b) for b in self.dynamic_mask))
        object.__setattr__(self, "values", values)

    @property
    def num_nodes(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def dynamic_columns(self) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.dynamic_mask, dtype=bool))

    def with_values(self, values: np.ndarray) -> NodeFeatures:
        return NodeFeatures(values, self.field_names, self.dynamic_mask)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """T frames of per-node fields over one fixed graph."""

    graph: Graph
    fields: np.ndarray
    dt: float
    field_names: tuple[str, ...]
    dynamic_mask: tuple[bool, ...]
    history_depth: int = 0

    def __post_init__(self) -> None:
        fields = np.asarray(self.fields)
        if fields.ndim != 3:
            raise ShapeMismatchError(f"Trajectory fields must be T×N×F, got {fields.shape}")
        if fields.shape[1] != self.graph.num_nodes:
            raise ShapeMismatchError(
                f"Fields cover {fields.shape[1]} nodes, graph has {self.graph.num_nodes}"
            )
        if len(self.field_names) != fields.shape[2] or len(self.dynamic_mask) != fields.shape[2]:
            raise ShapeMismatchError(
                f"Field metadata does not match F={fields.shape[2]}"
            )
        if self.history_depth not in (0, 1):
            raise GraphValidationError(
                f"history_depth must be 0 or 1, got {self.history_depth}"
            )
        if not np.all(np.isfinite(fields)):
            raise NonFiniteError("Trajectory fields contain NaN or Inf")
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "field_names", tuple(self.field_names))
        object.__setattr__(self, "dynamic_mask", tuple(bool(b) for b in self.dynamic_mask))

    @property
    def num_frames(self) -> int:
        return int(self.fields.shape[0])

    @property
    def num_nodes(self) -> int:
        return int(self.fields.shape[1])

    @property
    def num_fields(self) -> int:
        return int(self.fields.shape[2])

    @property
    def dynamic_columns(self) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.dynamic_mask, dtype=bool))

    @property
    def static_columns(self) -> np.ndarray:
        return np.flatnonzero(~np.asarray(self.dynamic_mask, dtype=bool))

    @property
    def num_dynamic(self) -> int:
        return int(self.dynamic_columns.shape[0])

    def frame(self, t: int) -> NodeFeatures:
        return NodeFeatures(self.fields[t], self.field_names, self.dynamic_mask)

    def dynamic(self, t: int) -> np.ndarray:
        """Dynamic fields of frame ``t`` as an N×F_dyn array."""
        return self.fields[t][:, self.dynamic_columns]

    def with_fields(self, fields: np.ndarray) -> Trajectory:
        return Trajectory(
            graph=self.graph,
            fields=fields,
            dt=self.dt,
            field_names=self.field_names,
            dynamic_mask=self.dynamic_mask,
            history_depth=self.history_depth,
        )

    def slice(self, frames: Sequence[int] | slice) -> Trajectory:
        return self.with_fields(self.fields[frames])
