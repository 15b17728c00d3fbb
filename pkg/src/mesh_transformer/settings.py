"""Process-level runtime settings resolved from the environment."""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .utils.env import get_env_choice, get_env_int, is_env_truthy

logger = logging.getLogger("mesh-transformer.settings")


@dataclass(frozen=True)
class RuntimeSettings:
    """Runtime knobs that are not part of a run configuration file.

    - debug_finite: check every recorded tape op for NaN/Inf
    - workers: default worker count for sweeps and data generation
    - precision: float width used for training tapes and weights
    """

    debug_finite: bool = False
    workers: int = 1
    precision: Literal["float32", "float64"] = "float32"

    @property
    def dtype(self) -> type[np.floating]:
        """The numpy dtype matching ``precision``."""
        return np.float64 if self.precision == "float64" else np.float32

    @classmethod
    def from_env(cls) -> "RuntimeSettings":
        """Create settings from environment variables.

        Returns:
            RuntimeSettings with values from MESH_DEBUG_FINITE, MESH_WORKERS and
            MESH_PRECISION
        """
        precision = get_env_choice(
            "MESH_PRECISION", ("float32", "float64"), "float32"
        )
        settings = cls(
            debug_finite=is_env_truthy("MESH_DEBUG_FINITE"),
            workers=get_env_int("MESH_WORKERS", 1),
            precision=precision,  # type: ignore[arg-type]
        )
        logger.debug(f"Runtime settings: {settings}")
        return settings
