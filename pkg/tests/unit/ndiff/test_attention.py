"""Tests for sparse masked attention."""

import numpy as np
import pytest

from mesh_transformer.augment.random_edges import add_random_edges
from mesh_transformer.exceptions import NonSquareMaskError, ShapeMismatchError
from mesh_transformer.graphcore.mask import SparseMask, adjacency_mask
from mesh_transformer.ndiff import (
    Tape,
    finite_diff_check,
    masked_attention,
    neighborhood_weights,
    weighted_sum,
)
from tests.utils.assertions import assert_close, dense_masked_attention
from tests.utils.factories import GraphFactory


def _qkv(n: int, width: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, width)), rng.normal(size=(n, width)), rng.normal(size=(n, width))


def _run(q, k, v, mask, mode="neighborhood"):
    tape = Tape(record=False)
    return masked_attention(
        tape.constant(q), tape.constant(k), tape.constant(v), mask, mode
    ).value


class TestMaskedAttention:
    """Forward values against dense references."""

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_dense_oracle(self, seed):
        g = GraphFactory.random(25, seed=seed)
        mask = add_random_edges(adjacency_mask(g, self_loops=True), 10, seed=seed)
        q, k, v = _qkv(25, 4, seed)

        assert_close(_run(q, k, v, mask), dense_masked_attention(q, k, v, mask.to_dense()))

    def test_empty_rows_output_zero(self):
        mask = SparseMask.from_dense(np.array([[0, 1, 0], [0, 0, 0], [1, 1, 1]], dtype=bool))
        q, k, v = _qkv(3, 2)

        out = _run(q, k, v, mask)

        assert np.all(out[1] == 0.0)
        assert np.allclose(out[0], v[1])

    def test_full_mask_is_standard_attention(self):
        q, k, v = _qkv(6, 3, seed=4)
        scores = q @ k.T / np.sqrt(3)
        probs = np.exp(scores - scores.max(axis=1, keepdims=True))
        probs /= probs.sum(axis=1, keepdims=True)

        out = _run(q, k, v, SparseMask.from_dense(np.ones((6, 6), dtype=bool)))

        assert_close(out, probs @ v)

    def test_dense_mode_masks_after_softmax(self):
        """Dense mode takes the full softmax and zeroes masked-out weights afterwards."""
        mask = adjacency_mask(GraphFactory.path(5))
        q, k, v = _qkv(5, 2, seed=2)
        scores = q @ k.T / np.sqrt(2)
        probs = np.exp(scores - scores.max(axis=1, keepdims=True))
        probs /= probs.sum(axis=1, keepdims=True)

        out = _run(q, k, v, mask, mode="dense")

        assert_close(out, (probs * mask.to_dense()) @ v)

    def test_weights_sum_to_one_per_row(self, random_graph):
        mask = adjacency_mask(random_graph)
        q, k, _ = _qkv(random_graph.num_nodes, 4)

        weights = neighborhood_weights(q, k, mask)
        sums = np.bincount(mask.row_ids(), weights=weights, minlength=mask.num_rows)

        assert np.allclose(sums, 1.0)

    def test_row_shift_invariance(self, random_graph):
        """Adding a constant to every score of a row leaves its weights unchanged."""
        mask = adjacency_mask(random_graph, self_loops=True)
        q, k, v = _qkv(random_graph.num_nodes, 4, seed=2)
        # k_j + u shifts row i's scores by q_i·u/2, the same for every j
        shifted = k + np.array([3.0, -1.5, 0.25, 2.0])

        assert np.allclose(
            neighborhood_weights(q, shifted, mask), neighborhood_weights(q, k, mask), atol=1e-12
        )
        assert_close(_run(q, shifted, v, mask), _run(q, k, v, mask))

    def test_permutation_equivariance(self, random_graph):
        """Relabeling nodes permutes the output rows."""
        perm = np.random.default_rng(3).permutation(random_graph.num_nodes)
        q, k, v = _qkv(random_graph.num_nodes, 4)

        original = _run(q, k, v, adjacency_mask(random_graph))
        permuted = _run(q[perm], k[perm], v[perm], adjacency_mask(random_graph.permute(perm)))

        assert_close(permuted, original[perm])

    def test_non_square_mask(self):
        q, k, v = _qkv(2, 2)

        with pytest.raises(NonSquareMaskError):
            _run(q, k, v, SparseMask.from_dense(np.ones((2, 3), dtype=bool)))

    def test_mask_size_mismatch(self):
        q, k, v = _qkv(4, 2)

        with pytest.raises(ShapeMismatchError):
            _run(q, k, v, SparseMask.identity(3))


class TestAttentionGradients:
    @pytest.mark.parametrize("mode", ["neighborhood", "dense"])
    def test_gradient_check(self, mode):
        g = GraphFactory.random(12, k=3, seed=1)
        mask = adjacency_mask(g, self_loops=True)
        q, k, v = _qkv(12, 3, seed=5)
        direction = np.random.default_rng(6).normal(size=(12, 3))

        def f(tape, p):
            return weighted_sum(masked_attention(p["q"], p["k"], p["v"], mask, mode), direction)

        assert finite_diff_check(f, {"q": q, "k": k, "v": v}, n_coords=108) < 1e-4
