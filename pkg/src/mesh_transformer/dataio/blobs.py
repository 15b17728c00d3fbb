"""Little-endian binary blobs described by a meta.json entry."""

import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import Field

from ..exceptions import CorruptMetaError, LengthMismatchError, UnsupportedVersionError
from ..models.base import SchemaModel
from ..models.constants import MGF_FORMAT_VERSION
from ..utils.io import read_json

BlobDtype = Literal["<f4", "<u4"]

META_FILENAME = "meta.json"


class BlobInfo(SchemaModel):
    file: str
    dtype: BlobDtype
    shape: tuple[int, ...]
    byte_length: int = Field(ge=0)

    def expected_bytes(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) * 4


def write_blob(directory: Path, file: str, array: np.ndarray, dtype: BlobDtype) -> BlobInfo:
    """Write ``array`` row-major as ``dtype`` and describe it."""
    data = np.ascontiguousarray(array, dtype=np.dtype(dtype))
    (directory / file).write_bytes(data.tobytes(order="C"))
    return BlobInfo(file=file, dtype=dtype, shape=tuple(data.shape), byte_length=data.nbytes)


def read_blob(directory: Path, info: BlobInfo) -> np.ndarray:
    """
    Read a blob, checking its size against the declared byte length.

    Raises:
        CorruptMetaError: If the declared length does not match the declared shape
        LengthMismatchError: If the file size differs from the declared length
    """
    if info.byte_length != info.expected_bytes():
        raise CorruptMetaError(
            f"Blob {info.file} declares {info.byte_length} bytes for shape {info.shape}"
        )
    path = directory / info.file
    if not path.is_file():
        raise LengthMismatchError(f"Blob {info.file} is missing")
    size = path.stat().st_size
    if size != info.byte_length:
        raise LengthMismatchError(
            f"Blob {info.file} has {size} bytes, meta.json declares {info.byte_length}"
        )
    return np.fromfile(path, dtype=np.dtype(info.dtype)).reshape(info.shape)


def read_meta(directory: Path) -> dict[str, Any]:
    """
    Load meta.json and check its format version.

    Raises:
        CorruptMetaError: If the file is missing or not a JSON object
        UnsupportedVersionError: If the format version is not supported
    """
    path = directory / META_FILENAME
    try:
        data = read_json(path)
    except FileNotFoundError as e:
        raise CorruptMetaError(f"{path} does not exist") from e
    except (OSError, json.JSONDecodeError) as e:
        raise CorruptMetaError(f"Cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise CorruptMetaError(f"{path} is not a JSON object")
    version = data.get("format_version")
    if not isinstance(version, int):
        raise CorruptMetaError(f"{path} has no integer format_version")
    if version != MGF_FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path} has format_version {version}; supported: {MGF_FORMAT_VERSION}"
        )
    return data
