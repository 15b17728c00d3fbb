"""Tests for the transformer block against a loop-by-loop reference."""

import math

import numpy as np
import pytest

from mesh_transformer.augment.plan import BASE_KEY, head_mask_plan
from mesh_transformer.graphcore.mask import SparseMask
from mesh_transformer.models.config import AugmentSpec
from mesh_transformer.ndiff import Tape
from mesh_transformer.network.layers import block_forward
from mesh_transformer.network.weights import init_weights
from tests.utils.factories import ConfigFactory

EPS = 1e-6


def _rmsnorm_rows(x, gain):
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        rms = math.sqrt(sum(value * value for value in x[i]) / x.shape[1] + EPS)
        out[i] = [x[i, c] / rms * gain[c] for c in range(x.shape[1])]
    return out


def _gelu(value):
    return value * 0.5 * (1.0 + math.erf(value / math.sqrt(2.0)))


def _reference_block(z, w, mask, heads, layer=0):
    """Attention, residual norm, gated MLP and residual norm written out per node."""
    p = f"layers.{layer}"
    n, d = z.shape
    width = d // heads
    q, k, v = z @ w[f"{p}.attn.w_q"], z @ w[f"{p}.attn.w_k"], z @ w[f"{p}.attn.w_v"]
    merged = np.zeros((n, d))
    for head in range(heads):
        cols = slice(head * width, (head + 1) * width)
        for i in range(n):
            support = [j for j in range(n) if mask[i, j]]
            if not support:
                continue
            scores = [float(q[i, cols] @ k[j, cols]) / math.sqrt(width) for j in support]
            top = max(scores)
            exps = [math.exp(s - top) for s in scores]
            total = sum(exps)
            for weight, j in zip(exps, support, strict=True):
                merged[i, cols] += weight / total * v[j, cols]
    z_mid = _rmsnorm_rows(merged @ w[f"{p}.attn.w_o"] + z, w[f"{p}.norm1.gain"])

    left = z_mid @ w[f"{p}.mlp.w_l"] + w[f"{p}.mlp.b_l"]
    left = np.vectorize(_gelu)(left)
    right = z_mid @ w[f"{p}.mlp.w_r"] + w[f"{p}.mlp.b_r"]
    mixed = (left * right) @ w[f"{p}.mlp.w_f"] + w[f"{p}.mlp.b_f"]
    return _rmsnorm_rows(mixed + z_mid, w[f"{p}.norm2.gain"])


def _run_block(z, weights, mask, cfg):
    plan = head_mask_plan(cfg.layers, cfg.heads, AugmentSpec.disabled(), {BASE_KEY: mask})
    tape = Tape(dtype=np.float64, record=False)
    params = {name: tape.constant(array) for name, array in weights.items()}
    return block_forward(tape.constant(z), params, plan, 0, cfg).value


class TestBlockForward:
    """Tests for block_forward."""

    @pytest.fixture
    def cfg(self):
        return ConfigFactory.model(d=4, layers=1, heads=2)

    @pytest.fixture
    def weights(self, cfg):
        """Initialized weights with non-trivial biases and gains."""
        rng = np.random.default_rng(5)
        arrays = dict(init_weights(cfg, seed=3).items())
        for name, array in arrays.items():
            if array.ndim == 1:
                arrays[name] = array + rng.normal(scale=0.3, size=array.shape)
        return arrays

    def test_matches_reference(self, cfg, weights):
        dense = np.array(
            [
                [1, 1, 0, 0],
                [1, 1, 1, 0],
                [0, 1, 1, 1],
                [0, 0, 0, 0],
            ],
            dtype=bool,
        )
        z = np.random.default_rng(0).normal(size=(4, 4))

        out = _run_block(z, weights, SparseMask.from_dense(dense), cfg)

        assert np.allclose(out, _reference_block(z, weights, dense, cfg.heads), atol=1e-10)

    def test_zero_attention_keeps_residual(self, cfg, weights):
        """With silent attention and MLP the block reduces to normalizing Z."""
        for name in ("attn.w_q", "attn.w_k", "attn.w_v", "attn.w_o", "mlp.w_f", "mlp.b_f"):
            weights[f"layers.0.{name}"] = np.zeros_like(weights[f"layers.0.{name}"])
        weights["layers.0.norm1.gain"] = np.ones(4)
        weights["layers.0.norm2.gain"] = np.ones(4)
        z = np.random.default_rng(1).normal(size=(4, 4))
        ones = np.ones(4)

        out = _run_block(z, weights, SparseMask.identity(4), cfg)

        assert np.allclose(out, _rmsnorm_rows(_rmsnorm_rows(z, ones), ones), atol=1e-12)
        assert np.allclose(out, _rmsnorm_rows(z, ones), atol=1e-5)
