"""Exception hierarchy for mesh-transformer.

Every error raised by the library derives from ``MeshTransformerError`` so that the
CLI can map it to a machine-readable error document and an exit code.
"""

from typing import Any


class MeshTransformerError(Exception):
    """Base class for all mesh-transformer errors."""

    def to_dict(self) -> dict[str, Any]:
        """Serialize the error for the CLI error document.

        Returns:
            A dictionary with the error class name and message
        """
        return {"error": type(self).__name__, "message": str(self)}


class ConfigurationError(MeshTransformerError, ValueError):
    """Raised when a configuration file or argument fails validation."""

    pass


# Graph construction


class GraphValidationError(MeshTransformerError, ValueError):
    """Raised when graph inputs violate the Graph invariants."""

    pass


class IndexOutOfRangeError(GraphValidationError):
    """Raised when an edge references a node index outside [0, N)."""

    pass


class RaggedCoordsError(GraphValidationError):
    """Raised when node coordinates are not a rectangular N×D array."""

    pass


class EmptyGraphError(GraphValidationError):
    """Raised when an operation needs at least one node."""

    pass


# Sparse masks and augmentations


class MaskError(MeshTransformerError, ValueError):
    """Raised when a sparse mask is malformed or incompatible."""

    pass


class NonSquareMaskError(MaskError):
    """Raised when a square mask is required."""

    pass


class TooManyRequestedError(MaskError):
    """Raised when more random edges are requested than non-edges exist."""

    pass


class PlanError(MeshTransformerError, ValueError):
    """Raised when a head mask plan cannot be built."""

    pass


class PlanRequiresMoreLayersError(PlanError):
    """Raised when a dilation plan's tail span exceeds the layer count."""

    pass


class PlanRequiresMoreHeadsError(PlanError):
    """Raised when a dilation plan is requested with fewer than two heads."""

    pass


class EigenFailureError(MeshTransformerError):
    """Raised when the Laplacian eigendecomposition does not converge."""

    pass


# Numerical core


class ShapeMismatchError(MeshTransformerError, ValueError):
    """Raised when array shapes do not agree."""

    pass


class NonFiniteError(MeshTransformerError, FloatingPointError):
    """Raised when an operation produces NaN or Inf in debug mode."""

    pass


# Training


class TrainingError(MeshTransformerError):
    """Base class for training failures."""

    pass


class NonFiniteLossError(TrainingError):
    """Raised when the training loss becomes NaN or Inf."""

    def __init__(self, message: str, step: int, lr: float) -> None:
        super().__init__(message)
        self.step = step
        self.lr = lr

    def __reduce__(self) -> tuple[Any, ...]:
        return (type(self), (str(self), self.step, self.lr))

    def to_dict(self) -> dict[str, Any]:
        return {**super().to_dict(), "step": self.step, "lr": self.lr}


class NoMaskedNodesError(TrainingError, ValueError):
    """Raised when masked pretraining selects no node to reconstruct."""

    pass


class StepOutOfRangeError(TrainingError, ValueError):
    """Raised when a schedule is queried outside [0, total_iters]."""

    pass


# Rollout


class RolloutError(MeshTransformerError, ValueError):
    """Base class for rollout and metric failures."""

    pass


class HorizonExceededError(RolloutError):
    """Raised when a rollout runs past the last trajectory frame."""

    pass


class TrajectoryTooShortError(RolloutError):
    """Raised when a metric needs at least two frames."""

    pass


# Scaling laws


class ScalingError(MeshTransformerError, ValueError):
    """Base class for isoFLOP and power-law failures."""

    pass


class TooFewRunsError(ScalingError):
    """Raised when an isoFLOP group has too few runs for a minimum."""

    pass


class NonPositiveInputError(ScalingError):
    """Raised when a power-law fit receives non-positive values."""

    pass


class BudgetTooSmallError(ScalingError):
    """Raised when a FLOPs budget yields too few training steps for a model."""

    pass


# Data files and generation


class DataFormatError(MeshTransformerError):
    """Base class for MGF format errors."""

    pass


class CorruptMetaError(DataFormatError):
    """Raised when meta.json is missing, unparsable or inconsistent."""

    pass


class LengthMismatchError(DataFormatError):
    """Raised when a blob's size differs from its declared length."""

    pass


class UnsupportedVersionError(DataFormatError):
    """Raised when meta.json declares an unknown format version."""

    pass


class DegenerateGeometryError(MeshTransformerError):
    """Raised when the generator cannot produce a connected k-NN graph."""

    pass


class UnstableTimestepError(MeshTransformerError, ValueError):
    """Raised when an explicit diffusion step would violate the stability bound."""

    pass
