"""Adam and AdamW updates over named parameter arrays."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ShapeMismatchError
from ..models.config import OptimizerConfig


@dataclass
class AdamState:
    """First and second moment estimates plus the step counter."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, weights: Mapping[str, np.ndarray]) -> AdamState:
        return cls(
            step=0,
            m={name: np.zeros_like(a) for name, a in weights.items()},
            v={name: np.zeros_like(a) for name, a in weights.items()},
        )


def adamw_step(
    weights: dict[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    cfg: OptimizerConfig,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """
    One bias-corrected Adam update.

    AdamW first decays every weight by (1 − lr·wd), then applies the Adam
    step. Adam mode adds wd·w to the gradient instead.

    Args:
        weights: Parameter arrays, updated in place and returned
        grads: Gradient per parameter name; missing names are treated as zero
        state: Moment estimates, updated in place and returned
        lr: Learning rate of this step
        cfg: Betas, epsilon, weight decay and optimizer kind

    Raises:
        ShapeMismatchError: If a gradient shape differs from its parameter
    """
    state.step += 1
    beta1, beta2 = cfg.beta1, cfg.beta2
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step

    for name, w in weights.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(w)
        elif grad.shape != w.shape:
            raise ShapeMismatchError(
                f"Gradient of '{name}' has shape {grad.shape}, parameter has {w.shape}"
            )
        grad = grad.astype(w.dtype, copy=False)
        if cfg.kind == "adamw":
            w *= 1.0 - lr * cfg.weight_decay
        elif cfg.weight_decay:
            grad = grad + cfg.weight_decay * w

        m = state.m.setdefault(name, np.zeros_like(w))
        v = state.v.setdefault(name, np.zeros_like(w))
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad

        denom = np.sqrt(v / correction2) + cfg.eps
        w -= (lr / correction1) * m / denom
    return weights, state
