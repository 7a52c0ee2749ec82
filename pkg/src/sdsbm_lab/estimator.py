"""Neighborhood-smoothing estimate of the edge-probability matrix from one adjacency matrix.

Pipeline: Gram matrix (1/n) A A^T -> dissimilarities d(i, j) -> quantile
neighborhoods N_i -> row averages of A over each neighborhood.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from loguru import logger

from .graph_model import AdjacencyMatrix, ProbabilityMatrix, _frozen


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """G = (1/n) A A^T, kept as integer inner products plus the divisor n."""

    inner: np.ndarray
    n: int

    @property
    def values(self) -> np.ndarray:
        return self.inner / self.n


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    """d(i, j) = max_{k != i, j} |<A_i. - A_j., A_k.>|, optionally divided by n."""

    values: np.ndarray
    normalized: bool
    n: int

    def raw(self) -> np.ndarray:
        """Integer dissimilarities (un-normalized convention)."""
        if not self.normalized:
            return self.values.astype(np.int64)
        return np.rint(self.values * self.n).astype(np.int64)


@dataclass(frozen=True, eq=False)
class NeighborhoodSet:
    """Membership mask of N_i (row i) with the bandwidth and per-node quantile thresholds."""

    mask: np.ndarray
    h: float
    thresholds: np.ndarray

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    @property
    def sizes(self) -> np.ndarray:
        return self.mask.sum(axis=1)

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.mask[i])

    def min_size(self) -> int:
        return int(self.sizes.min())


@dataclass(frozen=True, eq=False)
class EstimatedMatrix:
    """P-tilde: row i is the average of the adjacency rows of N_i."""

    values: np.ndarray
    neighborhood_sizes: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_csv(self, path: Union[str, Path]) -> None:
        """n rows of n comma-separated decimals with 9 significant digits."""
        lines = [",".join(f"{v:.9g}" for v in row) for row in self.values]
        try:
            Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as e:
            raise OSError(f"Failed to write estimated matrix to {path}: {e}") from e
        logger.info(f"Wrote {self.n}x{self.n} estimate to {path}")


def gram(A: AdjacencyMatrix) -> GramMatrix:
    """Integer inner products of adjacency rows via the sparse row-index representation."""
    if A.n < 2:
        raise ValueError(f"Gram matrix needs n >= 2, got {A.n}")
    inner = (A.csr @ A.csr.T).toarray().astype(np.int64)
    return GramMatrix(_frozen(inner), A.n)


def _dissimilarity_from_inner(inner: np.ndarray) -> np.ndarray:
    # Row i of the result only needs |inner[j] - inner[i]| over k != i, j; the
    # matrix is symmetric, so each pass fills row i and column i for j > i.
    n = inner.shape[0]
    inner = inner.astype(np.int32 if n < 2**31 else np.int64)
    raw = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        rest = np.abs(inner[i + 1 :] - inner[i])
        rest[:, i] = 0
        offsets = np.arange(rest.shape[0])
        rest[offsets, offsets + i + 1] = 0
        row = rest.max(axis=1)
        raw[i, i + 1 :] = row
        raw[i + 1 :, i] = row
    return raw


def dissimilarity_all(A: AdjacencyMatrix, normalized: bool = True) -> DissimilarityMatrix:
    """All pairwise dissimilarities, O(n^3) from the Gram matrix.

    With ``normalized`` the integer values are divided once by n, i.e.
    d(i, j) = max_{k != i, j} |G_ik - G_jk|.
    """
    if A.n < 3:
        raise ValueError(f"Dissimilarities need n >= 3, got {A.n}")
    raw = _dissimilarity_from_inner(gram(A).inner)
    values = raw / A.n if normalized else raw.astype(np.float64)
    return DissimilarityMatrix(_frozen(values), normalized, A.n)


def neighborhood_rank(n: int, h: float) -> int:
    """The order statistic ceil(h (n - 1)) used as the quantile q_i(h).

    The product is taken on the decimal value of h, so 0.28 * 25 is 7 and
    not 7.000000000000001.
    """
    return max(1, math.ceil(Fraction(str(float(h))) * (n - 1)))


def neighborhoods(D: DissimilarityMatrix, h: float) -> NeighborhoodSet:
    """N_i = {j != i : d(i, j) <= q_i(h)}, ties at the threshold included."""
    if not 0.0 < h < 1.0:
        raise ValueError(f"Bandwidth h must lie in (0, 1), got {h}")
    n = D.values.shape[0]
    rank = neighborhood_rank(n, h)
    masked = np.array(D.values, dtype=np.float64, copy=True)
    np.fill_diagonal(masked, np.inf)
    thresholds = np.partition(masked, rank - 1, axis=1)[:, rank - 1]
    mask = masked <= thresholds[:, None]
    result = NeighborhoodSet(_frozen(mask), float(h), _frozen(thresholds))
    logger.debug(
        f"Neighborhoods: n={n}, h={h:.4f}, rank={rank}, "
        f"sizes min={result.min_size()} max={int(result.sizes.max())}"
    )
    return result


def smooth(A: AdjacencyMatrix, N: NeighborhoodSet) -> EstimatedMatrix:
    """P-tilde_ij = (1/|N_i|) sum_{i' in N_i} A_i'j, integer counts divided once."""
    sizes = N.sizes
    if np.any(sizes == 0):
        raise RuntimeError("Empty neighborhood encountered while smoothing")
    counts = (sp.csr_matrix(N.mask, dtype=np.int64) @ A.csr).toarray()
    values = counts / sizes[:, None]
    return EstimatedMatrix(_frozen(values), _frozen(sizes))


def default_bandwidth(n: int, h_constant: float = 1.0) -> float:
    """h = C_h * sqrt(log n / n)."""
    if n < 2:
        raise ValueError(f"Bandwidth needs n >= 2, got {n}")
    h = h_constant * math.sqrt(math.log(n) / n)
    if not 0.0 < h < 1.0:
        raise ValueError(
            f"Default bandwidth {h:.4f} (C_h={h_constant}, n={n}) is outside (0, 1)"
        )
    return h


def estimate(
    A: AdjacencyMatrix, h: Optional[float] = None, h_constant: float = 1.0
) -> EstimatedMatrix:
    """Full neighborhood-smoothing estimate; ``h`` defaults to C_h sqrt(log n / n)."""
    if A.n < 3:
        raise ValueError(f"Estimation needs n >= 3, got {A.n}")
    if h is None:
        h = default_bandwidth(A.n, h_constant)
    logger.debug(f"Estimating P: n={A.n}, h={h:.4f}")
    D = dissimilarity_all(A)
    return smooth(A, neighborhoods(D, h))


MatrixLike = Union[ProbabilityMatrix, EstimatedMatrix, np.ndarray]


def _difference(P: MatrixLike, P_tilde: MatrixLike) -> np.ndarray:
    left = np.asarray(getattr(P, "values", P), dtype=np.float64)
    right = np.asarray(getattr(P_tilde, "values", P_tilde), dtype=np.float64)
    if left.shape != right.shape:
        raise ValueError(f"Dimension mismatch: {left.shape} vs {right.shape}")
    return right - left


def row_error_2inf(P: MatrixLike, P_tilde: MatrixLike) -> float:
    """||P-tilde - P||_{2,inf} = max_i ||P-tilde_i. - P_i.||_2."""
    return float(np.linalg.norm(_difference(P, P_tilde), axis=1).max())


def frobenius_error(P: MatrixLike, P_tilde: MatrixLike) -> float:
    return float(np.linalg.norm(_difference(P, P_tilde), "fro"))


def max_row_mse(P: MatrixLike, P_tilde: MatrixLike) -> float:
    """max_i (1/n) ||P-tilde_i. - P_i.||^2."""
    diff = _difference(P, P_tilde)
    return float((diff**2).sum(axis=1).max() / diff.shape[1])
