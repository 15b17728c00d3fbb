"""Tests for parameter shapes, counts and initialization."""

import numpy as np
import pytest

from mesh_transformer.exceptions import ShapeMismatchError
from mesh_transformer.models.config import ModelConfig
from mesh_transformer.models.constants import PRESET_PARAMS_MILLIONS
from mesh_transformer.network.weights import (
    init_weights,
    param_count,
    parameter_shapes,
    transfer_weights,
)
from tests.utils.factories import ConfigFactory


class TestParamCount:
    """Tests for param_count."""

    @pytest.mark.parametrize("preset", ["S", "M", "L", "XL"])
    def test_presets_match_published_sizes(self, preset):
        """Cylinder-like widths reproduce the published sizes within 5%."""
        cfg = ModelConfig.from_preset(preset)
        expected = PRESET_PARAMS_MILLIONS[preset] * 1e6

        assert abs(param_count(cfg) - expected) / expected < 0.05

    def test_per_layer_formula(self):
        """Each block adds 13d² + 9d parameters with expansion 3."""
        base = ConfigFactory.model(d=16, layers=1, expansion=3)
        deeper = ConfigFactory.model(d=16, layers=4, expansion=3)

        assert param_count(deeper) - param_count(base) == 3 * (13 * 16**2 + 9 * 16)

    def test_count_matches_initialized_weights(self, tiny_model_cfg):
        assert init_weights(tiny_model_cfg).num_scalars == param_count(tiny_model_cfg)

    def test_encoder_reads_features_and_encoding(self, tiny_model_cfg):
        shapes = parameter_shapes(tiny_model_cfg)

        assert shapes["encoder.0.weight"] == (7 + 2, 8)
        assert shapes["decoder.1.weight"] == (8, 1)
        assert shapes["layers.1.mlp.w_l"] == (8, 16)


class TestInitWeights:
    def test_deterministic_for_seed(self, tiny_model_cfg):
        a = init_weights(tiny_model_cfg, seed=3)
        b = init_weights(tiny_model_cfg, seed=3)

        assert all(np.array_equal(a[name], b[name]) for name in a)

    def test_biases_zero_gains_one(self, tiny_model_cfg):
        w = init_weights(tiny_model_cfg)

        assert np.all(w["encoder.0.bias"] == 0.0)
        assert np.all(w["layers.0.norm1.gain"] == 1.0)

    def test_matrix_scale(self):
        """Matrices are drawn with variance 1/fan_in."""
        cfg = ConfigFactory.model(d=256, layers=1, heads=4)
        w = init_weights(cfg, seed=0)

        assert np.std(w["layers.0.attn.w_q"]) == pytest.approx(1 / 16, rel=0.05)

    def test_dtype(self, tiny_model_cfg):
        w = init_weights(tiny_model_cfg, dtype=np.float32)

        assert w.dtype == np.float32

    def test_check_shapes(self, tiny_model_cfg):
        w = init_weights(tiny_model_cfg)
        del w.arrays["decoder.1.bias"]

        with pytest.raises(ShapeMismatchError, match="decoder.1.bias"):
            w.check_shapes(tiny_model_cfg)


class TestTransferWeights:
    def test_compatible_arrays_are_copied(self, tiny_model_cfg):
        """Encoder and blocks transfer; a decoder of a different width is fresh."""
        pretrained_cfg = ConfigFactory.model(p_out=8)
        pretrained = init_weights(pretrained_cfg, seed=1)

        w = transfer_weights(pretrained, tiny_model_cfg, seed=2)

        assert np.array_equal(w["layers.1.attn.w_o"], pretrained["layers.1.attn.w_o"])
        assert np.array_equal(w["decoder.0.weight"], pretrained["decoder.0.weight"])
        assert w["decoder.1.weight"].shape == (8, 1)
        w.check_shapes(tiny_model_cfg)
