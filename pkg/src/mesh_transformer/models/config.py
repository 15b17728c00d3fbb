"""
Configuration schemas for models, augmentations, training and runs.

Every schema rejects unknown keys. A run configuration file is a JSON document
validated by ``RunConfig`` before any work starts.
"""

import math
from pathlib import Path
from typing import Annotated, Literal

from pydantic import Field, field_validator, model_validator

from .base import SchemaModel
from .constants import (
    CYLINDER_COORD_DIM,
    CYLINDER_P_IN,
    CYLINDER_P_OUT,
    DEFAULT_ADAM_EPS,
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    DEFAULT_EXPANSION,
    DEFAULT_FLAT_FRACTION,
    DEFAULT_GLOBAL_FRACTION,
    DEFAULT_GLOBAL_NODE_TYPES,
    DEFAULT_LOG_EVERY,
    DEFAULT_MASK_FRACTION,
    DEFAULT_RANDOM_EDGE_FRACTION,
    DEFAULT_TAIL_LAYERS,
    DEFAULT_WEIGHT_DECAY,
    MIN_SWEEP_STEPS,
    MODEL_GRID,
    PRESET_SCHEDULES,
    PRESETS,
)

NodeTypeName = Literal["normal", "inflow", "outflow", "wall", "obstacle"]
DilationPlan = Literal["none", "dilation2", "dilation3", "dilation2_3"]
PresetName = Literal["S", "M", "L", "XL", "custom"]


class AugmentSpec(SchemaModel):
    """Adjacency augmentations applied on top of the base attention mask."""

    dilation_plan: DilationPlan = "none"
    random_edge_fraction: float = Field(default=DEFAULT_RANDOM_EDGE_FRACTION, ge=0.0, le=1.0)
    global_fraction: float = Field(default=DEFAULT_GLOBAL_FRACTION, ge=0.0, le=1.0)
    global_node_types: tuple[NodeTypeName, ...] = DEFAULT_GLOBAL_NODE_TYPES
    reseed_per_step: bool = True
    khop: int = Field(default=1, ge=1)
    tail_layers: int = Field(default=DEFAULT_TAIL_LAYERS, ge=1)
    dilation_union: bool = False
    seed: int = 0
    global_seed: int = 0

    @classmethod
    def disabled(cls) -> "AugmentSpec":
        """A spec that leaves the base adjacency mask untouched."""
        return cls(random_edge_fraction=0.0, global_fraction=0.0)

    @property
    def is_identity(self) -> bool:
        return (
            self.dilation_plan == "none"
            and self.random_edge_fraction == 0.0
            and self.global_fraction == 0.0
            and self.khop == 1
        )


class PositionalEncodingSpec(SchemaModel):
    """Positional encoding appended to the node features."""

    mode: Literal["coords", "laplacian", "random_walk", "none"] = "coords"
    size: int = Field(default=8, ge=1)

    def width(self, coord_dim: int) -> int:
        """Number of encoding columns q for a graph of dimension ``coord_dim``."""
        if self.mode == "coords":
            return coord_dim
        if self.mode == "none":
            return 0
        return self.size


class ModelConfig(SchemaModel):
    """Architecture hyperparameters of the Encode-Process-Decode transformer."""

    preset: PresetName = "custom"
    d: int = Field(ge=1)
    layers: int = Field(ge=1)
    heads: int = Field(ge=1)
    expansion: int = Field(default=DEFAULT_EXPANSION, ge=1)
    p_in: int = Field(ge=1)
    p_out: int = Field(ge=1)
    coord_dim: Literal[2, 3] = CYLINDER_COORD_DIM
    pe: PositionalEncodingSpec = PositionalEncodingSpec()
    augment: AugmentSpec = AugmentSpec.disabled()
    self_loops: bool = False
    attention_mode: Literal["neighborhood", "dense"] = "neighborhood"
    target_kind: Literal["delta", "absolute"] = "delta"

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelConfig":
        if self.d % self.heads != 0:
            raise ValueError(f"d={self.d} is not divisible by heads={self.heads}")
        if self.preset != "custom":
            expected = PRESETS[self.preset]
            actual = (self.d, self.layers, self.heads)
            if actual != expected:
                raise ValueError(
                    f"Preset {self.preset} requires (d, layers, heads)={expected}, got {actual}"
                )
        return self

    @classmethod
    def from_preset(
        cls,
        name: str,
        p_in: int = CYLINDER_P_IN,
        p_out: int = CYLINDER_P_OUT,
        **overrides: object,
    ) -> "ModelConfig":
        """Build the configuration of a named preset (S, M, L, XL)."""
        d, layers, heads = PRESETS[name]
        return cls.model_validate(
            {
                "preset": name,
                "d": d,
                "layers": layers,
                "heads": heads,
                "p_in": p_in,
                "p_out": p_out,
                **overrides,
            }
        )

    @property
    def head_dim(self) -> int:
        return self.d // self.heads

    @property
    def gated_width(self) -> int:
        return self.expansion * self.d

    @property
    def pe_width(self) -> int:
        return self.pe.width(self.coord_dim)

    @property
    def input_width(self) -> int:
        """Encoder input width p_in + q."""
        return self.p_in + self.pe_width


class OptimizerConfig(SchemaModel):
    kind: Literal["adamw", "adam"] = "adamw"
    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, lt=1.0)
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, lt=1.0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0.0)
    eps: float = Field(default=DEFAULT_ADAM_EPS, gt=0.0)


class WarmupCosine(SchemaModel):
    """Linear warmup from 0 to lr_max, then cosine decay to lr_min."""

    kind: Literal["warmup_cosine"] = "warmup_cosine"
    lr_max: float = Field(gt=0.0)
    lr_min: float = Field(gt=0.0)
    warmup_iters: int = Field(ge=0)
    total_iters: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "WarmupCosine":
        if self.lr_max < self.lr_min:
            raise ValueError(f"lr_max={self.lr_max} is below lr_min={self.lr_min}")
        if self.warmup_iters > self.total_iters:
            raise ValueError(
                f"warmup_iters={self.warmup_iters} exceeds total_iters={self.total_iters}"
            )
        return self


class ExponentialTail(SchemaModel):
    """Flat learning rate, then exponential decay reaching decay_to at the last step."""

    kind: Literal["exponential_tail"] = "exponential_tail"
    lr_flat: float = Field(gt=0.0)
    decay_to: float = Field(gt=0.0)
    flat_fraction: float = Field(default=DEFAULT_FLAT_FRACTION, ge=0.0, lt=1.0)
    total_iters: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "ExponentialTail":
        if self.decay_to > self.lr_flat:
            raise ValueError(f"decay_to={self.decay_to} exceeds lr_flat={self.lr_flat}")
        return self


Schedule = Annotated[WarmupCosine | ExponentialTail, Field(discriminator="kind")]


def with_total_iters(schedule: Schedule, total_iters: int) -> Schedule:
    """Rescale a schedule to a new run length, clamping the warmup span."""
    if isinstance(schedule, WarmupCosine):
        return schedule.model_copy(
            update={
                "total_iters": total_iters,
                "warmup_iters": min(schedule.warmup_iters, total_iters),
            }
        )
    return schedule.model_copy(update={"total_iters": total_iters})


class TrainConfig(SchemaModel):
    """Optimizer, schedule, noise injection and loop settings."""

    optimizer: OptimizerConfig = OptimizerConfig()
    schedule: Schedule
    noise_sigmas: tuple[float, ...] = ()
    batch: int = Field(default=1, ge=1)
    epochs: int | None = Field(default=None, ge=1)
    log_every: int = Field(default=DEFAULT_LOG_EVERY, ge=1)
    seed: int = 0
    mask_fraction: float = Field(default=DEFAULT_MASK_FRACTION, gt=0.0, lt=1.0)

    @field_validator("noise_sigmas")
    @classmethod
    def _check_sigmas(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(s < 0 or not math.isfinite(s) for s in value):
            raise ValueError(f"noise sigmas must be finite and non-negative, got {value}")
        return value

    @property
    def total_iters(self) -> int:
        return self.schedule.total_iters

    def resolved_for(self, num_samples: int) -> "TrainConfig":
        """Derive the run length from ``epochs`` when it is set."""
        if self.epochs is None:
            return self
        total = max(1, math.ceil(self.epochs * num_samples / self.batch))
        return self.model_copy(update={"schedule": with_total_iters(self.schedule, total)})

    @classmethod
    def for_preset(cls, preset: str, total_iters: int, **overrides: object) -> "TrainConfig":
        """Default warmup-cosine training setup of a named preset."""
        lr_max, lr_min, warmup = PRESET_SCHEDULES[preset]
        schedule = WarmupCosine(
            lr_max=lr_max,
            lr_min=lr_min,
            warmup_iters=min(warmup, total_iters),
            total_iters=total_iters,
        )
        return cls.model_validate({"schedule": schedule.model_dump(), **overrides})


class DataPaths(SchemaModel):
    train: str
    test: str | None = None


class GridEntry(SchemaModel):
    d: int = Field(ge=1)
    layers: int = Field(ge=1)
    heads: int = Field(ge=1)


def full_grid() -> tuple[GridEntry, ...]:
    """Every (d, layers, heads) of the model grid, smallest first."""
    return tuple(GridEntry(d=d, layers=layers, heads=heads) for d, layers, heads in MODEL_GRID)


class SweepSpec(SchemaModel):
    """isoFLOP sweep: every budget is trained with every grid entry (default: the full grid)."""

    budgets: tuple[float, ...] = Field(min_length=1)
    grid: tuple[GridEntry, ...] = Field(default_factory=full_grid, min_length=1)
    workers: int = Field(default=1, ge=1)
    refine: bool = True
    min_steps: int = Field(default=MIN_SWEEP_STEPS, ge=1)
    eval_rollout: bool = True

    @field_validator("budgets")
    @classmethod
    def _check_budgets(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= 0 for b in value):
            raise ValueError(f"budgets must be positive, got {value}")
        return value


class RunConfig(SchemaModel):
    """A complete run: model, training, data and optional sweep settings."""

    model: ModelConfig
    train: TrainConfig
    data: DataPaths | None = None
    sweep: SweepSpec | None = None

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        """Load and validate a run configuration file.

        Raises:
            ConfigurationError: If the file is missing, malformed or invalid
        """
        return cls.from_json_file(path)
