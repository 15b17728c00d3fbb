"""Random symmetric connections added to an attention mask."""

import logging

import numpy as np

from ..exceptions import MaskError, NonSquareMaskError, TooManyRequestedError
from ..graphcore.mask import SparseMask

logger = logging.getLogger("mesh-transformer.augment")

# Below this many candidate pairs the non-edges are enumerated instead of
# rejection-sampled.
_ENUMERATION_LIMIT = 2_000_000


def undirected_edge_count(m: SparseMask) -> int:
    """Number of off-diagonal undirected pairs stored in a symmetric mask."""
    rows = m.row_ids()
    return int(np.count_nonzero(rows < m.col_indices))


def resolve_edge_count(m: SparseMask, count_or_fraction: int | float) -> int:
    """Turn an absolute count (int) or a fraction of current edges (float) into a count."""
    if isinstance(count_or_fraction, (int, np.integer)) and not isinstance(
        count_or_fraction, bool
    ):
        if count_or_fraction < 0:
            raise MaskError(f"Random edge count must be non-negative, got {count_or_fraction}")
        return int(count_or_fraction)
    fraction = float(count_or_fraction)
    if not 0.0 <= fraction <= 1.0:
        raise MaskError(f"Random edge fraction must lie in [0, 1], got {fraction}")
    return int(round(fraction * undirected_edge_count(m)))


def _existing_keys(m: SparseMask) -> np.ndarray:
    rows = m.row_ids()
    cols = m.col_indices
    upper = rows < cols
    return rows[upper] * m.num_rows + cols[upper]


def _enumerate(n: int, existing: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    i, j = np.triu_indices(n, k=1)
    keys = i.astype(np.int64) * n + j
    candidates = np.setdiff1d(keys, existing, assume_unique=True)
    return rng.choice(candidates, size=count, replace=False)


def _rejection(n: int, existing: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    taken = set(existing.tolist())
    chosen: list[int] = []
    while len(chosen) < count:
        draw = max(2 * (count - len(chosen)), 16)
        a = rng.integers(0, n, size=draw)
        b = rng.integers(0, n, size=draw)
        keep = a != b
        lo = np.minimum(a[keep], b[keep])
        hi = np.maximum(a[keep], b[keep])
        for key in (lo * n + hi).tolist():
            if key not in taken:
                taken.add(key)
                chosen.append(key)
                if len(chosen) == count:
                    break
    return np.asarray(chosen, dtype=np.int64)


def add_random_edges(
    m: SparseMask,
    count_or_fraction: int | float,
    seed: int | np.random.Generator,
) -> SparseMask:
    """
    Add ``j`` random symmetric pairs (i ≠ j) that are not already in the mask.

    Args:
        m: Square symmetric mask; it is never modified
        count_or_fraction: An int is the number of pairs; a float is a fraction
            of the mask's current undirected edge count
        seed: Seed or generator; a fixed seed yields the same pairs every call

    Returns:
        A new mask with exactly 2·j additional entries

    Raises:
        NonSquareMaskError: If the mask is not square
        TooManyRequestedError: If j exceeds the number of available non-edges
    """
    if not m.is_square:
        raise NonSquareMaskError(f"Random edges need a square mask, got {m.shape}")
    count = resolve_edge_count(m, count_or_fraction)
    if count == 0:
        return m

    n = m.num_rows
    existing = _existing_keys(m)
    available = n * (n - 1) // 2 - existing.shape[0]
    if count > available:
        raise TooManyRequestedError(
            f"Requested {count} random edges but only {available} non-edges exist"
        )

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n * (n - 1) // 2 <= _ENUMERATION_LIMIT or 2 * count > available:
        keys = _enumerate(n, existing, count, rng)
    else:
        keys = _rejection(n, existing, count, rng)

    a, b = keys // n, keys % n
    added = SparseMask.from_pairs(np.concatenate([a, b]), np.concatenate([b, a]), m.shape)
    logger.debug(f"Added {count} random edge pairs to a {n}-node mask")
    return m.union(added)
