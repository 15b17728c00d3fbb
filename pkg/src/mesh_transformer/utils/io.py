"""I/O utility functions for mesh-transformer."""

import json
import logging
from pathlib import Path
from typing import Any

logger = logging.getLogger("mesh-transformer.utils.io")


def ensure_output_dir(path: str | Path) -> Path:
    """Create an output directory (and parents) if needed.

    Args:
        path: Directory to create

    Returns:
        The directory as a Path
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_json(path: str | Path, payload: Any) -> Path:
    """Write a JSON document with stable formatting.

    Args:
        path: Destination file
        payload: JSON-serializable object

    Returns:
        The written path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.debug(f"Wrote {target}")
    return target


def read_json(path: str | Path) -> Any:
    """Read a JSON document.

    Args:
        path: Source file

    Returns:
        The decoded object
    """
    return json.loads(Path(path).read_text(encoding="utf-8"))
