"""Comparison methods: K-means on adjacency rows (KMA), directed spectral clustering and d-score."""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from loguru import logger
from scipy.spatial.distance import cdist

from .clustering import KMeansOptions, canonical_labels, kmeans
from .graph_model import AdjacencyMatrix, LabelVector, _frozen

# |u_1(i)| below this marks node i as degenerate for the d-score ratios.
DEGENERATE_THRESHOLD = 1e-12


class SvdConvergenceError(RuntimeError):
    """Subspace iteration did not reach the requested residual."""

    def __init__(self, residual: float, iterations: int, tol: float):
        super().__init__(
            f"Truncated SVD did not converge: residual {residual:.3e} > tol {tol:.1e} "
            f"after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class SvdResult:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    residual: float = 0.0
    iterations: int = 0

    @property
    def K(self) -> int:
        return self.singular_values.size


def _operator(A: Union[AdjacencyMatrix, np.ndarray]):
    if isinstance(A, AdjacencyMatrix):
        return A.csr.astype(np.float64)
    M = np.asarray(A, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError(f"SVD expects a 2-D matrix, got shape {M.shape}")
    return M


def truncated_svd(
    A: Union[AdjacencyMatrix, np.ndarray],
    K: int,
    tol: float = 1e-10,
    max_iters: int = 1000,
    rng: Optional[np.random.Generator] = None,
    oversample: int = 10,
) -> SvdResult:
    """Leading K singular triplets by randomized subspace iteration on A A^T.

    Each pass projects A onto the current orthonormal block Q, takes the
    singular triplets of the small matrix Q^T A, and checks the residual
    ||A V - U S||_F / sigma_1. Columns are signed so that the largest-magnitude
    entry of each left vector is positive.
    """
    M = _operator(A)
    rows, cols = M.shape
    if not 1 <= K <= min(rows, cols):
        raise ValueError(f"Truncated SVD needs 1 <= K <= {min(rows, cols)}, got K={K}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    rng = rng if rng is not None else np.random.default_rng()

    block = min(rows, cols, K + oversample)
    Q, _ = np.linalg.qr(np.asarray(M @ rng.standard_normal((cols, block))))
    residual = np.inf
    for iteration in range(1, max_iters + 1):
        small = np.asarray(M.T @ Q).T
        Ub, s, Vt = np.linalg.svd(small, full_matrices=False)
        U = Q @ Ub[:, :K]
        sigma = s[:K]
        V = Vt[:K].T
        if sigma[0] > 0:
            residual = float(np.linalg.norm(np.asarray(M @ V) - U * sigma, "fro") / sigma[0])
        else:
            residual = 0.0
        if residual < tol:
            break
        Q, _ = np.linalg.qr(np.asarray(M @ np.asarray(M.T @ Q)))
    else:
        raise SvdConvergenceError(residual, max_iters, tol)

    pivots = np.abs(U).argmax(axis=0)
    signs = np.where(U[pivots, np.arange(K)] < 0, -1.0, 1.0)
    logger.debug(
        f"Truncated SVD: K={K}, iterations={iteration}, residual={residual:.2e}, "
        f"sigma_1={sigma[0]:.4g}"
    )
    return SvdResult(
        singular_values=_frozen(sigma),
        left_vectors=_frozen(U * signs),
        right_vectors=_frozen(V * signs),
        residual=residual,
        iterations=iteration,
    )


def kma(
    A: AdjacencyMatrix,
    K: int,
    opts: Optional[KMeansOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> LabelVector:
    """K-means directly on the binary rows of A."""
    if A.n < K:
        raise ValueError(f"KMA needs n >= K, got n={A.n}, K={K}")
    return kmeans(A.dense(), K, opts, rng).labels


def spectral(
    A: AdjacencyMatrix,
    K: int,
    opts: Optional[KMeansOptions] = None,
    rng: Optional[np.random.Generator] = None,
    svd_tol: float = 1e-10,
    svd_max_iters: int = 1000,
    svd_oversample: int = 10,
) -> LabelVector:
    """K-means on the n x 2K embedding [U | V] of leading left and right singular vectors."""
    if A.n < K:
        raise ValueError(f"Spectral clustering needs n >= K, got n={A.n}, K={K}")
    rng = rng if rng is not None else np.random.default_rng()
    svd = truncated_svd(A, K, svd_tol, svd_max_iters, rng, svd_oversample)
    embedding = np.hstack([svd.left_vectors, svd.right_vectors])
    return kmeans(embedding, K, opts, rng).labels


def ratio_embedding(vectors: np.ndarray, clip: float) -> np.ndarray:
    """Entrywise v_{k+1} / v_1 for k = 1..K-1, zero where |v_1| is degenerate, clipped to [-clip, clip]."""
    lead = vectors[:, [0]]
    out = np.zeros((vectors.shape[0], vectors.shape[1] - 1), dtype=np.float64)
    np.divide(vectors[:, 1:], lead, out=out, where=np.abs(lead) >= DEGENERATE_THRESHOLD)
    return np.clip(out, -clip, clip)


def dscore(
    A: AdjacencyMatrix,
    K: int,
    opts: Optional[KMeansOptions] = None,
    rng: Optional[np.random.Generator] = None,
    clip: Optional[float] = None,
    svd_tol: float = 1e-10,
    svd_max_iters: int = 1000,
    svd_oversample: int = 10,
) -> LabelVector:
    """Directed SCORE: K-means on entrywise ratios to the leading singular vectors.

    Nodes whose leading left or right entry is below ``DEGENERATE_THRESHOLD``
    are left out of the fit and assigned to the nearest cluster centroid in the
    raw [U | V] embedding. ``clip`` defaults to log n.
    """
    if K < 2:
        raise ValueError("d-score needs K >= 2 (ratios use the second singular vector onward)")
    if A.n < K:
        raise ValueError(f"d-score needs n >= K, got n={A.n}, K={K}")
    rng = rng if rng is not None else np.random.default_rng()
    threshold = math.log(A.n) if clip is None else float(clip)

    svd = truncated_svd(A, K, svd_tol, svd_max_iters, rng, svd_oversample)
    U, V = svd.left_vectors, svd.right_vectors
    embedding = np.hstack([ratio_embedding(U, threshold), ratio_embedding(V, threshold)])

    degenerate = (np.abs(U[:, 0]) < DEGENERATE_THRESHOLD) | (
        np.abs(V[:, 0]) < DEGENERATE_THRESHOLD
    )
    fit = ~degenerate
    if fit.sum() < K:
        logger.warning(
            f"d-score: only {int(fit.sum())} non-degenerate nodes for K={K}; clustering all nodes"
        )
        fit = np.ones(A.n, dtype=bool)

    result = kmeans(embedding[fit], K, opts, rng)
    labels = np.empty(A.n, dtype=np.int64)
    labels[fit] = result.labels.labels

    if not fit.all():
        raw = np.hstack([U, V])
        fitted = labels[fit]
        centroids = np.vstack([raw[fit][fitted == c].mean(axis=0) for c in range(K)])
        labels[~fit] = cdist(raw[~fit], centroids, "sqeuclidean").argmin(axis=1)
        logger.debug(f"d-score: assigned {int((~fit).sum())} degenerate nodes by nearest centroid")

    return LabelVector(canonical_labels(labels), K)
