"""Boolean sparse masks in compressed-row form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..exceptions import EmptyGraphError, MaskError, NonSquareMaskError
from .graph import Graph


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SparseMask:
    """An immutable boolean CSR matrix.

    Column indices are strictly increasing inside every row.
    """

    num_rows: int
    num_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray

    def __post_init__(self) -> None:
        offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        cols = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        if offsets.shape != (self.num_rows + 1,):
            raise MaskError(
                f"row_offsets must have {self.num_rows + 1} entries, got {offsets.shape}"
            )
        if offsets[0] != 0 or offsets[-1] != cols.shape[0]:
            raise MaskError("row_offsets must start at 0 and end at nnz")
        if np.any(np.diff(offsets) < 0):
            raise MaskError("row_offsets must be non-decreasing")
        if cols.size and (cols.min() < 0 or cols.max() >= self.num_cols):
            raise MaskError("column index out of range")
        if cols.size > 1:
            steps = np.diff(cols)
            row_starts = np.zeros(cols.shape[0], dtype=bool)
            row_starts[offsets[1:-1][offsets[1:-1] < cols.shape[0]]] = True
            if np.any((steps <= 0) & ~row_starts[1:]):
                raise MaskError("column indices must be strictly increasing per row")
        object.__setattr__(self, "row_offsets", _readonly(offsets))
        object.__setattr__(self, "col_indices", _readonly(cols))

    @property
    def nnz(self) -> int:
        return int(self.col_indices.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.num_rows, self.num_cols)

    @property
    def is_square(self) -> bool:
        return self.num_rows == self.num_cols

    def row(self, i: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[i] : self.row_offsets[i + 1]]

    def row_counts(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry (COO row array)."""
        return np.repeat(np.arange(self.num_rows), self.row_counts())

    def to_scipy(self, dtype: type = np.float64) -> sp.csr_matrix:
        data = np.ones(self.nnz, dtype=dtype)
        return sp.csr_matrix(
            (data, self.col_indices, self.row_offsets), shape=self.shape
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=bool)
        dense[self.row_ids(), self.col_indices] = True
        return dense

    def transpose(self) -> SparseMask:
        return SparseMask.from_scipy(self.to_scipy().T)

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        other = self.transpose()
        return np.array_equal(self.row_offsets, other.row_offsets) and np.array_equal(
            self.col_indices, other.col_indices
        )

    def union(self, other: SparseMask) -> SparseMask:
        if self.shape != other.shape:
            raise MaskError(f"Cannot union masks of shape {self.shape} and {other.shape}")
        return SparseMask.from_scipy(self.to_scipy() + other.to_scipy())

    def with_diagonal(self) -> SparseMask:
        if not self.is_square:
            raise NonSquareMaskError(f"Mask of shape {self.shape} has no diagonal")
        return SparseMask.from_scipy(
            self.to_scipy() + sp.identity(self.num_rows, format="csr")
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMask):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_scipy(cls, matrix: sp.spmatrix) -> SparseMask:
        """Build a mask from the nonzero pattern of a scipy sparse matrix."""
        csr = sp.csr_matrix(matrix, copy=True)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        return cls(
            num_rows=csr.shape[0],
            num_cols=csr.shape[1],
            row_offsets=csr.indptr.astype(np.int64),
            col_indices=csr.indices.astype(np.int64),
        )

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> SparseMask:
        return cls.from_scipy(sp.csr_matrix(np.asarray(dense, dtype=bool).astype(np.int8)))

    @classmethod
    def from_pairs(
        cls, rows: np.ndarray, cols: np.ndarray, shape: tuple[int, int]
    ) -> SparseMask:
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        data = np.ones(rows.shape[0], dtype=np.int8)
        return cls.from_scipy(sp.coo_matrix((data, (rows, cols)), shape=shape))

    @classmethod
    def identity(cls, n: int) -> SparseMask:
        return cls(
            num_rows=n,
            num_cols=n,
            row_offsets=np.arange(n + 1),
            col_indices=np.arange(n),
        )

    @classmethod
    def empty(cls, n: int) -> SparseMask:
        return cls(
            num_rows=n,
            num_cols=n,
            row_offsets=np.zeros(n + 1, dtype=np.int64),
            col_indices=np.zeros(0, dtype=np.int64),
        )


def adjacency_mask(g: Graph, self_loops: bool = False) -> SparseMask:
    """
    Attention mask A of a graph.

    Args:
        g: The mesh graph
        self_loops: Whether every node also attends to itself

    Returns:
        A symmetric mask with nnz = N^e (+ N with self-loops)
    """
    n = g.num_nodes
    rows = g.senders
    cols = g.receivers
    if self_loops:
        rows = np.concatenate([rows, np.arange(n)])
        cols = np.concatenate([cols, np.arange(n)])
    return SparseMask.from_pairs(rows, cols, (n, n))


def degree_stats(m: SparseMask) -> tuple[int, float]:
    """
    Maximum and mean row degree of a mask.

    Raises:
        EmptyGraphError: If the mask has no rows
    """
    if m.num_rows == 0:
        raise EmptyGraphError("Degree statistics need at least one node")
    counts = m.row_counts()
    return int(counts.max()), m.nnz / m.num_rows
