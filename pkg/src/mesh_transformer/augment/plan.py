"""Per-layer, per-head assignment of attention masks."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

from ..exceptions import PlanError, PlanRequiresMoreHeadsError, PlanRequiresMoreLayersError
from ..graphcore.mask import SparseMask
from ..models.config import AugmentSpec
from .dilation import dilate

BASE_KEY = "base"
ADJACENCY_KEY = "adjacency"


def dilated_key(k: int) -> str:
    return f"dilated-{k}"


@dataclass(frozen=True)
class HeadMaskPlan:
    """Mask registry plus one registry key per (layer, head), both 0-based."""

    assignments: tuple[tuple[str, ...], ...]
    registry: Mapping[str, SparseMask]

    def __post_init__(self) -> None:
        sizes = {m.num_rows for m in self.registry.values()}
        if len(sizes) > 1:
            raise PlanError(f"Registered masks disagree on N: {sorted(sizes)}")
        for layer, keys in enumerate(self.assignments):
            for key in keys:
                if key not in self.registry:
                    raise PlanError(f"Layer {layer} uses unregistered mask '{key}'")

    @property
    def num_layers(self) -> int:
        return len(self.assignments)

    @property
    def num_heads(self) -> int:
        return len(self.assignments[0]) if self.assignments else 0

    def mask(self, layer: int, head: int) -> SparseMask:
        return self.registry[self.assignments[layer][head]]

    def layer_masks(self, layer: int) -> list[SparseMask]:
        return [self.registry[key] for key in self.assignments[layer]]

    def uses(self, key: str) -> list[tuple[int, int]]:
        """All (layer, head) slots assigned to ``key``."""
        return [
            (layer, head)
            for layer, keys in enumerate(self.assignments)
            for head, assigned in enumerate(keys)
            if assigned == key
        ]


def _dilated_mask(
    k: int, masks: Mapping[str, SparseMask], union: bool
) -> SparseMask:
    key = dilated_key(k)
    if key in masks:
        return masks[key]
    adjacency = masks.get(ADJACENCY_KEY, masks[BASE_KEY])
    dilated = dilate(adjacency, k)
    return dilated.union(adjacency) if union else dilated


def head_mask_plan(
    layers: int,
    heads: int,
    spec: AugmentSpec,
    masks: Mapping[str, SparseMask],
) -> HeadMaskPlan:
    """
    Assign a registered mask to every (layer, head) slot.

    Dilated heads are the last ceil(H/2) heads. ``dilation2`` and ``dilation3``
    put A² or A³ on them in the last ``spec.tail_layers`` layers;
    ``dilation2_3`` puts A² on them in the middle third of the layers and A³
    in the tail. Every other slot uses ``masks["base"]``.

    Args:
        layers: Number of layers L
        heads: Number of heads H
        spec: Augmentation spec selecting the dilation plan
        masks: Registry holding ``base``, optionally ``adjacency`` (the
            un-augmented mask dilations are computed from) and precomputed
            ``dilated-k`` masks

    Raises:
        PlanRequiresMoreLayersError: If L is smaller than the dilation tail
        PlanRequiresMoreHeadsError: If a dilation plan has fewer than 2 heads
    """
    if layers < 1 or heads < 1:
        raise PlanError(f"A plan needs at least one layer and head, got L={layers}, H={heads}")
    if BASE_KEY not in masks:
        raise PlanError("The mask registry has no 'base' entry")

    grid = [[BASE_KEY] * heads for _ in range(layers)]
    registry: dict[str, SparseMask] = {BASE_KEY: masks[BASE_KEY]}

    plan = spec.dilation_plan
    if plan != "none":
        if heads < 2:
            raise PlanRequiresMoreHeadsError(f"Plan {plan} needs at least 2 heads, got {heads}")
        tail = spec.tail_layers
        if layers < tail:
            raise PlanRequiresMoreLayersError(
                f"Plan {plan} dilates the last {tail} layers but the model has {layers}"
            )
        dilated_heads = range(heads - math.ceil(heads / 2), heads)
        tail_layers = range(layers - tail, layers)

        spans: list[tuple[int, range]]
        if plan == "dilation2":
            spans = [(2, tail_layers)]
        elif plan == "dilation3":
            spans = [(3, tail_layers)]
        else:
            spans = [(2, range(layers // 3, (2 * layers) // 3)), (3, tail_layers)]

        for k, span in spans:
            key = dilated_key(k)
            registry[key] = _dilated_mask(k, masks, spec.dilation_union)
            for layer in span:
                for head in dilated_heads:
                    grid[layer][head] = key

    return HeadMaskPlan(
        assignments=tuple(tuple(row) for row in grid),
        registry=registry,
    )
