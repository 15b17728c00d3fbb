"""Model checkpoints in the MGF blob convention: meta.json plus one float32 blob per array."""

import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import ValidationError

from ..exceptions import CorruptMetaError
from ..models.base import SchemaModel
from ..models.config import ModelConfig
from ..models.constants import MGF_FORMAT_VERSION
from ..network.normalizer import Normalizer
from ..network.simulator import Simulator
from ..network.weights import Weights
from ..settings import RuntimeSettings
from ..utils.io import ensure_output_dir, write_json
from .blobs import META_FILENAME, BlobInfo, read_blob, read_meta, write_blob

logger = logging.getLogger("mesh-transformer.dataio")


class CheckpointMeta(SchemaModel):
    format_version: int = MGF_FORMAT_VERSION
    kind: Literal["checkpoint"] = "checkpoint"
    model: ModelConfig
    input_normalizer: dict[str, Any]
    target_normalizer: dict[str, Any]
    params: dict[str, BlobInfo]


def save_weights_dir(
    weights: Weights,
    path: str | Path,
    cfg: ModelConfig,
    input_norm: Normalizer,
    target_norm: Normalizer,
) -> Path:
    """Write weights and normalizers to a checkpoint directory."""
    directory = ensure_output_dir(path)
    params = {
        name: write_blob(directory, f"{name}.f32", array, "<f4")
        for name, array in weights.items()
    }
    meta = CheckpointMeta(
        model=cfg,
        input_normalizer=input_norm.to_dict(),
        target_normalizer=target_norm.to_dict(),
        params=params,
    )
    write_json(directory / META_FILENAME, meta.model_dump(mode="json"))
    logger.info(f"Saved checkpoint with {weights.num_scalars} parameters to {directory}")
    return directory


def save_checkpoint(sim: Simulator, path: str | Path) -> Path:
    return save_weights_dir(sim.weights, path, sim.cfg, sim.input_norm, sim.target_norm)


def load_checkpoint(path: str | Path, settings: RuntimeSettings | None = None) -> Simulator:
    """
    Load a checkpoint directory as a Simulator.

    Raises:
        CorruptMetaError: If meta.json is malformed or the weights do not fit the config
        LengthMismatchError: If a parameter blob has the wrong size
        UnsupportedVersionError: If the format version is unknown
    """
    directory = Path(path)
    raw = read_meta(directory)
    try:
        meta = CheckpointMeta.model_validate(raw)
        input_norm = Normalizer.from_dict(meta.input_normalizer)
        target_norm = Normalizer.from_dict(meta.target_normalizer)
    except (ValidationError, KeyError, TypeError, ValueError) as e:
        raise CorruptMetaError(f"Invalid checkpoint meta in {directory}: {e}") from e

    weights = Weights({name: read_blob(directory, info) for name, info in meta.params.items()})
    try:
        return Simulator(meta.model, weights, input_norm, target_norm, settings)
    except ValueError as e:
        raise CorruptMetaError(
            f"Checkpoint weights in {directory} do not fit the config: {e}"
        ) from e
