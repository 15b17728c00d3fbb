"""MGF trajectory directories: meta.json plus coordinate, edge, type and field blobs."""

import logging
from pathlib import Path

import numpy as np
from pydantic import Field, ValidationError

from ..exceptions import CorruptMetaError, GraphValidationError
from ..graphcore.graph import NodeType, build_graph
from ..graphcore.trajectory import Trajectory
from ..models.base import SchemaModel
from ..models.constants import MGF_FORMAT_VERSION
from ..utils.io import ensure_output_dir, write_json
from .blobs import META_FILENAME, BlobInfo, read_blob, read_meta, write_blob

logger = logging.getLogger("mesh-transformer.dataio")

BLOB_FILES = {
    "coords": "coords.f32",
    "edges": "edges.u32",
    "node_type": "node_type.u32",
    "fields": "fields.f32",
}


class MgfMeta(SchemaModel):
    """Contents of an MGF trajectory's meta.json."""

    format_version: int = MGF_FORMAT_VERSION
    N: int = Field(ge=0)
    T: int = Field(ge=1)
    D: int = Field(ge=2, le=3)
    F: int = Field(ge=1)
    E: int = Field(ge=0)
    dt: float
    field_names: tuple[str, ...]
    dynamic_mask: tuple[bool, ...]
    node_type_encoding: dict[str, int]
    history_depth: int = Field(default=0, ge=0, le=1)
    blobs: dict[str, BlobInfo]


def _encoding() -> dict[str, int]:
    return {t.name.lower(): int(t) for t in NodeType}


def save_mgf(traj: Trajectory, path: str | Path) -> Path:
    """
    Write a trajectory as an MGF directory.

    Coordinates and fields are stored as little-endian float32, edges and node
    types as little-endian uint32, all row-major.
    """
    directory = ensure_output_dir(path)
    g = traj.graph
    blobs = {
        "coords": write_blob(directory, BLOB_FILES["coords"], g.coords, "<f4"),
        "edges": write_blob(directory, BLOB_FILES["edges"], g.edge_pairs, "<u4"),
        "node_type": write_blob(directory, BLOB_FILES["node_type"], g.node_type, "<u4"),
        "fields": write_blob(directory, BLOB_FILES["fields"], traj.fields, "<f4"),
    }
    meta = MgfMeta(
        N=g.num_nodes,
        T=traj.num_frames,
        D=g.dim,
        F=traj.num_fields,
        E=g.num_edges,
        dt=float(traj.dt),
        field_names=traj.field_names,
        dynamic_mask=traj.dynamic_mask,
        node_type_encoding=_encoding(),
        history_depth=traj.history_depth,
        blobs=blobs,
    )
    write_json(directory / META_FILENAME, meta.model_dump(mode="json"))
    logger.debug(f"Saved trajectory N={g.num_nodes} T={traj.num_frames} to {directory}")
    return directory


def _expect_shape(info: BlobInfo, shape: tuple[int, ...], name: str) -> None:
    if tuple(info.shape) != shape:
        raise CorruptMetaError(f"Blob '{name}' has shape {info.shape}, expected {shape}")


def load_mgf(path: str | Path) -> Trajectory:
    """
    Read an MGF directory.

    Raises:
        CorruptMetaError: If meta.json is missing, malformed or inconsistent
        LengthMismatchError: If a blob's size differs from its declared length
        UnsupportedVersionError: If the format version is unknown
    """
    directory = Path(path)
    raw = read_meta(directory)
    try:
        meta = MgfMeta.model_validate(raw)
    except ValidationError as e:
        raise CorruptMetaError(f"Invalid meta.json in {directory}: {e}") from e

    if len(meta.field_names) != meta.F or len(meta.dynamic_mask) != meta.F:
        raise CorruptMetaError(f"Field metadata in {directory} does not match F={meta.F}")
    if meta.node_type_encoding != _encoding():
        raise CorruptMetaError(f"Unknown node type encoding {meta.node_type_encoding}")
    missing = set(BLOB_FILES) - set(meta.blobs)
    if missing:
        raise CorruptMetaError(f"meta.json in {directory} lacks blobs {sorted(missing)}")

    expected = {
        "coords": (meta.N, meta.D),
        "edges": (meta.E, 2),
        "node_type": (meta.N,),
        "fields": (meta.T, meta.N, meta.F),
    }
    arrays = {}
    for name, shape in expected.items():
        info = meta.blobs[name]
        _expect_shape(info, shape, name)
        arrays[name] = read_blob(directory, info)

    try:
        graph = build_graph(arrays["coords"], arrays["node_type"], arrays["edges"])
    except GraphValidationError as e:
        raise CorruptMetaError(f"Invalid graph in {directory}: {e}") from e
    return Trajectory(
        graph=graph,
        fields=arrays["fields"],
        dt=meta.dt,
        field_names=meta.field_names,
        dynamic_mask=meta.dynamic_mask,
        history_depth=meta.history_depth,
    )


def is_mgf_dir(path: str | Path) -> bool:
    return (Path(path) / META_FILENAME).is_file()
