"""Forward and training FLOPs accounting."""

from ..exceptions import NonPositiveInputError
from ..models.config import ModelConfig
from ..models.records import FlopsReport
from .weights import param_count


def transformer_flops_per_node(d: int, layers: int) -> float:
    """Forward FLOPs per node of the masked transformer: L·26d²."""
    return float(layers * 26 * d * d)


def message_passing_flops_per_node(d: int, layers: int) -> float:
    """Forward FLOPs per node of a message-passing network of the same width: 6d² + L·22d²."""
    return float(6 * d * d + layers * 22 * d * d)


def flops_estimate(cfg: ModelConfig) -> FlopsReport:
    """Per-node forward FLOPs under the three accounting formulas."""
    params = param_count(cfg)
    transformer = transformer_flops_per_node(cfg.d, cfg.layers)
    mps = message_passing_flops_per_node(cfg.d, cfg.layers)
    two_p = 2.0 * params
    return FlopsReport(
        param_count=params,
        transformer_per_node=transformer,
        mps_per_node=mps,
        two_p=two_p,
        ratio_transformer=transformer / two_p,
        ratio_mps=mps / two_p,
    )


def training_flops(params: float, nodes: float) -> float:
    """
    Training FLOPs 6·P·D: 2P per node forward, twice that backward.

    Raises:
        NonPositiveInputError: If P or D is not positive
    """
    if params <= 0 or nodes <= 0:
        raise NonPositiveInputError(f"P and D must be positive, got P={params}, D={nodes}")
    return 6.0 * params * nodes
