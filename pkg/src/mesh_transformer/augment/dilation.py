"""Boolean powers of a mask: dilation and K-hop unions."""

import scipy.sparse as sp

from ..exceptions import MaskError, NonSquareMaskError
from ..graphcore.mask import SparseMask


def _square_matrix(m: SparseMask, op: str) -> sp.csr_matrix:
    if not m.is_square:
        raise NonSquareMaskError(f"{op} needs a square mask, got {m.shape}")
    return m.to_scipy()


def _binarize(matrix: sp.csr_matrix) -> sp.csr_matrix:
    matrix.data[:] = 1.0
    return matrix


def dilate(m: SparseMask, k: int) -> SparseMask:
    """
    Boolean k-th power: (i, j) is set iff a walk of exactly k steps joins them.

    Even powers keep the diagonal entries produced by back-and-forth walks.

    Raises:
        NonSquareMaskError: If the mask is not square
        MaskError: If k < 1
    """
    base = _square_matrix(m, "dilate")
    if k < 1:
        raise MaskError(f"Dilation power must be at least 1, got {k}")
    if k == 1:
        return m
    power = base
    for _ in range(k - 1):
        power = _binarize(power @ base)
    return SparseMask.from_scipy(power)


def khop_union(m: SparseMask, hops: int) -> SparseMask:
    """Union of dilate(m, 1..hops): every node reachable within ``hops`` steps."""
    base = _square_matrix(m, "khop_union")
    if hops < 1:
        raise MaskError(f"Hop count must be at least 1, got {hops}")
    if hops == 1:
        return m
    power = base
    union = base.copy()
    for _ in range(hops - 1):
        power = _binarize(power @ base)
        union = _binarize(union + power)
    return SparseMask.from_scipy(union)
