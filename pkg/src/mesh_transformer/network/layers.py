"""Encoder, transformer block and decoder over tape tensors."""

from collections.abc import Mapping

from ..augment.plan import HeadMaskPlan
from ..models.config import ModelConfig
from ..ndiff import (
    Tensor,
    add,
    column_slice,
    concat_columns,
    gelu,
    hadamard,
    linear,
    masked_attention,
    rmsnorm,
)

Params = Mapping[str, Tensor]


def mlp(x: Tensor, params: Params, prefix: str) -> Tensor:
    """Two linear layers with a GeLU in between."""
    hidden = gelu(linear(x, params[f"{prefix}.0.weight"], params[f"{prefix}.0.bias"]))
    return linear(hidden, params[f"{prefix}.1.weight"], params[f"{prefix}.1.bias"])


def encode(x: Tensor, params: Params) -> Tensor:
    """Z₀ = MLP(X ⊕ PE)."""
    return mlp(x, params, "encoder")


def decode(z: Tensor, params: Params) -> Tensor:
    """y = MLP(Z_L)."""
    return mlp(z, params, "decoder")


def multi_head_attention(
    z: Tensor,
    params: Params,
    plan: HeadMaskPlan,
    layer: int,
    cfg: ModelConfig,
) -> Tensor:
    """Masked multi-head self-attention; heads are concatenated in index order."""
    prefix = f"layers.{layer}.attn"
    q = linear(z, params[f"{prefix}.w_q"])
    k = linear(z, params[f"{prefix}.w_k"])
    v = linear(z, params[f"{prefix}.w_v"])
    width = cfg.head_dim
    heads = []
    for head, mask in enumerate(plan.layer_masks(layer)):
        lo, hi = head * width, (head + 1) * width
        heads.append(
            masked_attention(
                column_slice(q, lo, hi),
                column_slice(k, lo, hi),
                column_slice(v, lo, hi),
                mask,
                cfg.attention_mode,
            )
        )
    merged = heads[0] if len(heads) == 1 else concat_columns(heads)
    return linear(merged, params[f"{prefix}.w_o"])


def gated_mlp(z: Tensor, params: Params, layer: int) -> Tensor:
    """W_f·(GeLU(z W_l + b_l) ⊙ (z W_r + b_r)) + b_f."""
    prefix = f"layers.{layer}.mlp"
    left = gelu(linear(z, params[f"{prefix}.w_l"], params[f"{prefix}.b_l"]))
    right = linear(z, params[f"{prefix}.w_r"], params[f"{prefix}.b_r"])
    return linear(hadamard(left, right), params[f"{prefix}.w_f"], params[f"{prefix}.b_f"])


def block_forward(
    z: Tensor,
    params: Params,
    plan: HeadMaskPlan,
    layer: int,
    cfg: ModelConfig,
) -> Tensor:
    """
    One post-norm transformer block.

    Z' = RMSNorm(MMHA(Z) + Z), then RMSNorm(GatedMLP(Z') + Z').
    """
    attended = multi_head_attention(z, params, plan, layer, cfg)
    z_mid = rmsnorm(add(attended, z), params[f"layers.{layer}.norm1.gain"])
    mixed = gated_mlp(z_mid, params, layer)
    return rmsnorm(add(mixed, z_mid), params[f"layers.{layer}.norm2.gain"])
