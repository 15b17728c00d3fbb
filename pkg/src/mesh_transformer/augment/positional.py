"""Positional encodings appended to node features."""

import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from ..exceptions import EigenFailureError, MaskError
from ..graphcore.graph import Graph
from ..graphcore.mask import adjacency_mask
from ..models.config import PositionalEncodingSpec

logger = logging.getLogger("mesh-transformer.augment")

# Graphs up to this size use a dense eigendecomposition.
DENSE_EIGEN_LIMIT = 512
ZERO_EIGENVALUE_TOL = 1e-8


def _adjacency(g: Graph) -> sp.csr_matrix:
    return adjacency_mask(g, self_loops=False).to_scipy()


def normalized_laplacian(g: Graph) -> sp.csr_matrix:
    """Symmetric normalized Laplacian I − D^-1/2 A D^-1/2 (isolated rows left as I)."""
    adjacency = _adjacency(g)
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    inv_sqrt = np.zeros_like(degree)
    nonzero = degree > 0
    inv_sqrt[nonzero] = 1.0 / np.sqrt(degree[nonzero])
    scaling = sp.diags(inv_sqrt)
    return sp.identity(g.num_nodes, format="csr") - scaling @ adjacency @ scaling


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def laplacian_eigenvectors(g: Graph, m: int) -> np.ndarray:
    """
    Eigenvectors of the m smallest nonzero eigenvalues of the normalized Laplacian.

    Each column is sign-fixed so that its largest-magnitude entry is positive.
    Disconnected graphs are reported in the log; missing columns are zero.

    Raises:
        MaskError: If m ≥ N
        EigenFailureError: If the decomposition does not converge
    """
    n = g.num_nodes
    if m >= n:
        raise MaskError(f"Laplacian encoding size m={m} must be below N={n}")

    components, _ = connected_components(_adjacency(g), directed=False)
    if components > 1:
        logger.warning(
            f"Graph has {components} connected components; Laplacian encoding "
            "skips one zero eigenvalue per component"
        )

    laplacian = normalized_laplacian(g)
    wanted = min(m + components, n)
    try:
        if n <= DENSE_EIGEN_LIMIT or wanted >= n - 1:
            values, vectors = np.linalg.eigh(laplacian.toarray())
        else:
            values, vectors = eigsh(laplacian, k=wanted, which="SA", tol=1e-10)
    except (np.linalg.LinAlgError, ArpackNoConvergence, ArpackError) as e:
        raise EigenFailureError(f"Laplacian eigendecomposition failed: {e}") from e

    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]
    keep = np.abs(values) > ZERO_EIGENVALUE_TOL
    chosen = vectors[:, keep][:, :m]
    if chosen.shape[1] < m:
        logger.warning(f"Only {chosen.shape[1]} nonzero eigenvalues available, padding to {m}")
        chosen = np.pad(chosen, ((0, 0), (0, m - chosen.shape[1])))
    return _fix_signs(chosen)


def random_walk_encoding(g: Graph, m: int) -> np.ndarray:
    """Column k holds the diagonal of (D⁻¹A)^k for k = 1..m; isolated nodes stay 0."""
    adjacency = _adjacency(g)
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    inv = np.zeros_like(degree)
    inv[degree > 0] = 1.0 / degree[degree > 0]
    walk = sp.diags(inv) @ adjacency
    columns = []
    power = walk
    for _ in range(m):
        columns.append(power.diagonal())
        power = power @ walk
    return np.stack(columns, axis=1) if columns else np.zeros((g.num_nodes, 0))


def positional_encoding(g: Graph, spec: PositionalEncodingSpec) -> np.ndarray:
    """
    Compute the N×q positional encoding selected by ``spec.mode``.

    ``coords`` returns the coordinates (q = D), ``laplacian`` and
    ``random_walk`` return ``spec.size`` columns, ``none`` returns q = 0.
    """
    if spec.mode == "coords":
        return np.array(g.coords, dtype=np.float64)
    if spec.mode == "laplacian":
        return laplacian_eigenvectors(g, spec.size)
    if spec.mode == "random_walk":
        return random_walk_encoding(g, spec.size)
    return np.zeros((g.num_nodes, 0), dtype=np.float64)
