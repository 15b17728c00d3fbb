"""Per-graph mask construction with cached static state."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass

import numpy as np
from cachetools import LRUCache

from ..graphcore.graph import Graph
from ..graphcore.mask import SparseMask, adjacency_mask, degree_stats
from ..models.config import AugmentSpec, PositionalEncodingSpec
from ..models.records import AugmentStageStats
from .dilation import dilate, khop_union
from .global_nodes import add_global, select_global_nodes
from .plan import ADJACENCY_KEY, BASE_KEY, HeadMaskPlan, dilated_key, head_mask_plan
from .positional import positional_encoding
from .random_edges import add_random_edges, undirected_edge_count

logger = logging.getLogger("mesh-transformer.augment")

DEFAULT_CACHE_SIZE = 64


@dataclass(frozen=True)
class StaticMasks:
    """Masks of one graph that do not change between steps."""

    adjacency: SparseMask
    base: SparseMask
    global_nodes: np.ndarray
    base_with_global: SparseMask
    random_edge_count: int


class MaskBuilder:
    """
    Builds the head mask plan of a graph for every forward pass.

    Static state (adjacency, K-hop base, global nodes, dilated masks and
    positional encodings) is cached per graph fingerprint. Random edges are
    drawn again on every call when ``reseed_per_step`` is set.
    """

    def __init__(
        self,
        spec: AugmentSpec,
        layers: int,
        heads: int,
        self_loops: bool = False,
        cache_size: int = DEFAULT_CACHE_SIZE,
    ) -> None:
        self.spec = spec
        self.layers = layers
        self.heads = heads
        self.self_loops = self_loops
        self._static: LRUCache[str, StaticMasks] = LRUCache(maxsize=cache_size)
        self._dilated: LRUCache[tuple[str, int], SparseMask] = LRUCache(maxsize=cache_size)
        self._positional: LRUCache[tuple[str, str, int], np.ndarray] = LRUCache(
            maxsize=cache_size
        )
        self._lock = threading.Lock()
        self._inference_rng = np.random.default_rng(spec.seed)

    def static_masks(self, g: Graph) -> StaticMasks:
        with self._lock:
            cached = self._static.get(g.fingerprint)
        if cached is not None:
            return cached

        adjacency = adjacency_mask(g, self_loops=self.self_loops)
        base = khop_union(adjacency, self.spec.khop)
        nodes = select_global_nodes(
            g, self.spec.global_node_types, self.spec.global_fraction, self.spec.global_seed
        )
        static = StaticMasks(
            adjacency=adjacency,
            base=base,
            global_nodes=nodes,
            base_with_global=add_global(base, g, self.spec, nodes=nodes),
            random_edge_count=int(
                round(self.spec.random_edge_fraction * undirected_edge_count(base))
            ),
        )
        logger.debug(
            f"Static masks for graph {g.fingerprint[:8]}: base nnz={base.nnz}, "
            f"{nodes.shape[0]} global nodes, {static.random_edge_count} random pairs per step"
        )
        with self._lock:
            self._static[g.fingerprint] = static
        return static

    def _dilated_mask(self, g: Graph, static: StaticMasks, k: int) -> SparseMask:
        key = (g.fingerprint, k)
        with self._lock:
            cached = self._dilated.get(key)
        if cached is None:
            cached = dilate(static.adjacency, k)
            if self.spec.dilation_union:
                cached = cached.union(static.adjacency)
            with self._lock:
                self._dilated[key] = cached
        return cached

    def augmented_base(self, g: Graph, rng: np.random.Generator | None = None) -> SparseMask:
        """The base mask with this step's random edges and the global nodes."""
        static = self.static_masks(g)
        if static.random_edge_count == 0:
            return static.base_with_global
        if not self.spec.reseed_per_step:
            rng = np.random.default_rng(self.spec.seed)
        elif rng is None:
            with self._lock:
                return add_random_edges(
                    static.base_with_global, static.random_edge_count, self._inference_rng
                )
        return add_random_edges(static.base_with_global, static.random_edge_count, rng)

    def plan(self, g: Graph, rng: np.random.Generator | None = None) -> HeadMaskPlan:
        """
        Head mask plan for one forward pass over ``g``.

        Args:
            g: The graph
            rng: Random-edge stream. When omitted, the builder's own stream
                seeded from ``spec.seed`` is advanced. With reseeding off the
                edges are always drawn from a fresh ``spec.seed`` generator.
        """
        static = self.static_masks(g)
        registry: dict[str, SparseMask] = {
            BASE_KEY: self.augmented_base(g, rng),
            ADJACENCY_KEY: static.adjacency,
        }
        if self.spec.dilation_plan in ("dilation2", "dilation2_3"):
            registry[dilated_key(2)] = self._dilated_mask(g, static, 2)
        if self.spec.dilation_plan in ("dilation3", "dilation2_3"):
            registry[dilated_key(3)] = self._dilated_mask(g, static, 3)
        return head_mask_plan(self.layers, self.heads, self.spec, registry)

    def positional(self, g: Graph, spec: PositionalEncodingSpec) -> np.ndarray:
        key = (g.fingerprint, spec.mode, spec.size)
        with self._lock:
            cached = self._positional.get(key)
        if cached is None:
            cached = positional_encoding(g, spec)
            cached.setflags(write=False)
            with self._lock:
                self._positional[key] = cached
        return cached


def _stage(name: str, m: SparseMask) -> AugmentStageStats:
    deg_max, deg_mean = degree_stats(m)
    return AugmentStageStats(stage=name, nnz=m.nnz, deg_max=deg_max, deg_mean=deg_mean)


def augment_stats(
    g: Graph,
    spec: AugmentSpec,
    self_loops: bool = False,
    seed: int = 0,
) -> list[AugmentStageStats]:
    """
    Mask statistics after each augmentation stage.

    Stages: adjacency, K-hop base, random edges, global nodes, and every
    dilated mask the plan uses.
    """
    builder = MaskBuilder(spec, layers=max(spec.tail_layers, 1), heads=2, self_loops=self_loops)
    static = builder.static_masks(g)
    stats = [_stage("adjacency", static.adjacency), _stage(f"khop-{spec.khop}", static.base)]

    with_random = (
        add_random_edges(static.base, static.random_edge_count, seed)
        if static.random_edge_count
        else static.base
    )
    stats.append(_stage("random", with_random))
    stats.append(
        _stage("global", add_global(with_random, g, spec, nodes=static.global_nodes))
    )
    powers = {"dilation2": [2], "dilation3": [3], "dilation2_3": [2, 3]}.get(
        spec.dilation_plan, []
    )
    for k in powers:
        stats.append(_stage(dilated_key(k), builder._dilated_mask(g, static, k)))
    return stats
