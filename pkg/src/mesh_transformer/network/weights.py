"""Named parameter arrays of the transformer and their initialization."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ShapeMismatchError
from ..models.config import ModelConfig

logger = logging.getLogger("mesh-transformer.network")


def parameter_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Shape of every parameter, in a fixed order."""
    d, gated = cfg.d, cfg.gated_width
    shapes: dict[str, tuple[int, ...]] = {
        "encoder.0.weight": (cfg.input_width, d),
        "encoder.0.bias": (d,),
        "encoder.1.weight": (d, d),
        "encoder.1.bias": (d,),
    }
    for i in range(cfg.layers):
        prefix = f"layers.{i}"
        shapes.update(
            {
                f"{prefix}.attn.w_q": (d, d),
                f"{prefix}.attn.w_k": (d, d),
                f"{prefix}.attn.w_v": (d, d),
                f"{prefix}.attn.w_o": (d, d),
                f"{prefix}.norm1.gain": (d,),
                f"{prefix}.mlp.w_l": (d, gated),
                f"{prefix}.mlp.b_l": (gated,),
                f"{prefix}.mlp.w_r": (d, gated),
                f"{prefix}.mlp.b_r": (gated,),
                f"{prefix}.mlp.w_f": (gated, d),
                f"{prefix}.mlp.b_f": (d,),
                f"{prefix}.norm2.gain": (d,),
            }
        )
    shapes.update(
        {
            "decoder.0.weight": (d, d),
            "decoder.0.bias": (d,),
            "decoder.1.weight": (d, cfg.p_out),
            "decoder.1.bias": (cfg.p_out,),
        }
    )
    return shapes


def param_count(cfg: ModelConfig) -> int:
    """Exact number of scalars in the weights of ``cfg``."""
    return sum(int(np.prod(shape)) for shape in parameter_shapes(cfg).values())


@dataclass
class Weights(Mapping[str, np.ndarray]):
    """All learnable arrays of one model, keyed by parameter name.

    Extra entries (such as a pretraining mask token) may be stored alongside
    the architecture's parameters.
    """

    arrays: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.arrays)

    def __len__(self) -> int:
        return len(self.arrays)

    @property
    def num_scalars(self) -> int:
        return sum(int(a.size) for a in self.arrays.values())

    @property
    def dtype(self) -> np.dtype:
        first = next(iter(self.arrays.values()), None)
        return np.dtype(np.float64) if first is None else first.dtype

    def copy(self) -> Weights:
        return Weights({name: a.copy() for name, a in self.arrays.items()})

    def astype(self, dtype: type[np.floating] | np.dtype) -> Weights:
        return Weights({name: a.astype(dtype) for name, a in self.arrays.items()})

    def subset(self, prefix: str) -> dict[str, np.ndarray]:
        return {name: a for name, a in self.arrays.items() if name.startswith(prefix)}

    def check_shapes(self, cfg: ModelConfig) -> None:
        """
        Raises:
            ShapeMismatchError: If an architecture parameter is missing or misshapen
        """
        for name, shape in parameter_shapes(cfg).items():
            if name not in self.arrays:
                raise ShapeMismatchError(f"Missing parameter '{name}'")
            if self.arrays[name].shape != shape:
                raise ShapeMismatchError(
                    f"Parameter '{name}' has shape {self.arrays[name].shape}, expected {shape}"
                )


def init_weights(
    cfg: ModelConfig,
    seed: int | np.random.Generator = 0,
    dtype: type[np.floating] = np.float64,
) -> Weights:
    """
    Initialize weights: matrices ~ Normal(0, 1/fan_in), biases 0, norm gains 1.

    Deterministic for a given seed.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    arrays: dict[str, np.ndarray] = {}
    for name, shape in parameter_shapes(cfg).items():
        if name.endswith(".gain"):
            arrays[name] = np.ones(shape, dtype=dtype)
        elif len(shape) == 1:
            arrays[name] = np.zeros(shape, dtype=dtype)
        else:
            std = 1.0 / np.sqrt(shape[0])
            arrays[name] = rng.normal(0.0, std, size=shape).astype(dtype)
    weights = Weights(arrays)
    logger.debug(f"Initialized {weights.num_scalars} parameters for d={cfg.d}, L={cfg.layers}")
    return weights


def transfer_weights(
    pretrained: Mapping[str, np.ndarray],
    cfg: ModelConfig,
    seed: int | np.random.Generator = 0,
    dtype: type[np.floating] = np.float64,
) -> Weights:
    """
    Fresh weights for ``cfg`` with every shape-compatible pretrained array copied in.

    Used to fine-tune from a pretrained encoder model.
    """
    weights = init_weights(cfg, seed, dtype)
    copied = 0
    for name, array in pretrained.items():
        target = weights.arrays.get(name)
        if target is not None and target.shape == array.shape:
            weights.arrays[name] = np.array(array, dtype=dtype, copy=True)
            copied += 1
    logger.info(f"Transferred {copied}/{len(weights)} parameter arrays from pretrained weights")
    return weights
