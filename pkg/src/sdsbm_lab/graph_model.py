"""Sparse directed stochastic block model: parameters, label sampling and graph sampling."""

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from loguru import logger
from scipy.spatial.distance import pdist

EDGE_LIST_HEADER = re.compile(r"^#\s*n=(\d+)\s+directed=([01])\s*$")


def _frozen(array: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``array``."""
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """Base connection probabilities B (K x K) and the sparsity scale gamma."""

    entries: np.ndarray
    gamma: float = 1.0

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.size == 0:
            raise ValueError(
                f"Block matrix must be square and non-empty, got shape {entries.shape}"
            )
        if not np.all((entries >= 0.0) & (entries <= 1.0)):
            raise ValueError("Block matrix entries must lie in [0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"Sparsity scale gamma must lie in [0, 1], got {self.gamma}")
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def K(self) -> int:
        return self.entries.shape[0]

    def has_distinct_rows(self) -> bool:
        """Whether all rows of B are pairwise distinct (identifiability)."""
        return self.K < 2 or block_row_separation(self) > 0.0


@dataclass(frozen=True, eq=False)
class CommunityProbs:
    """Community assignment probabilities rho."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        if rho.ndim != 1 or rho.size == 0:
            raise ValueError("Community probabilities must be a non-empty vector")
        if np.any(rho < 0.0) or not np.all(np.isfinite(rho)):
            raise ValueError("Community probabilities must be finite and nonnegative")
        total = math.fsum(rho)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"Community probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "rho", _frozen(rho))

    @classmethod
    def uniform(cls, K: int) -> "CommunityProbs":
        if K < 1:
            raise ValueError(f"Community count must be positive, got {K}")
        return cls(np.full(K, 1.0 / K))

    @property
    def K(self) -> int:
        return self.rho.size

    @property
    def rho_min(self) -> float:
        return float(self.rho.min())


@dataclass(frozen=True, eq=False)
class LabelVector:
    """Community assignment of n nodes, each label in [0, K)."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValueError("Labels must be a one-dimensional vector")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise ValueError("Labels must be integers")
        labels = labels.astype(np.int64)
        if self.K < 1:
            raise ValueError(f"Community count must be positive, got {self.K}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.K):
            raise ValueError(f"Labels must lie in [0, {self.K})")
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "K", int(self.K))

    @property
    def n(self) -> int:
        return self.labels.size

    def __len__(self) -> int:
        return self.labels.size

    def community_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K)

    def min_community_size(self) -> int:
        """n_min: the smallest community size (communities, not nodes, are minimized over)."""
        return int(self.community_sizes().min())


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Edge probabilities P = gamma * B[pi(i), pi(j)], diagonal included."""

    values: np.ndarray
    labels: Optional[LabelVector] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"Probability matrix must be square, got shape {values.shape}")
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise ValueError("Probability matrix entries must lie in [0, 1]")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """Binary adjacency matrix with zero diagonal.

    Stored twice: bit-packed dense rows (``packed``) for O(n^2 / 8) storage and
    fast dense access, and a CSR matrix (``csr``) whose per-row index lists make
    Gram products cost O(n * edges) instead of O(n^3) on sparse graphs.
    """

    n: int
    packed: np.ndarray
    csr: sp.csr_matrix
    directed: bool = True

    @classmethod
    def from_dense(cls, values, directed: bool = True) -> "AdjacencyMatrix":
        values = np.asarray(values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"Adjacency matrix must be square, got shape {values.shape}")
        if not np.all(np.isin(values, (0, 1))):
            raise ValueError("Adjacency matrix must be binary")
        dense = values.astype(np.uint8)
        if np.any(np.diagonal(dense)):
            raise ValueError("Adjacency matrix must have a zero diagonal (no self-loops)")
        if not directed and not np.array_equal(dense, dense.T):
            raise ValueError("Undirected adjacency matrix must be symmetric")
        return cls(
            n=dense.shape[0],
            packed=_frozen(np.packbits(dense, axis=1)),
            csr=sp.csr_matrix(dense, dtype=np.int64),
            directed=bool(directed),
        )

    def dense(self) -> np.ndarray:
        """Unpacked n x n uint8 matrix."""
        return np.unpackbits(self.packed, axis=1, count=self.n)

    def row_indices(self, i: int) -> np.ndarray:
        """Column indices of the nonzeros in row ``i``."""
        return self.csr.indices[self.csr.indptr[i] : self.csr.indptr[i + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.csr.indptr)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.csr.indices, minlength=self.n)

    def edge_count(self) -> int:
        return int(self.csr.nnz if self.directed else self.csr.nnz // 2)


def sample_labels(probs: CommunityProbs, n: int, rng: np.random.Generator) -> LabelVector:
    """Draw n i.i.d. labels from Categorical(rho)."""
    if n < 1:
        raise ValueError(f"Node count must be at least 1, got {n}")
    labels = rng.choice(probs.K, size=n, p=probs.rho)
    return LabelVector(labels, probs.K)


def build_probability_matrix(labels: LabelVector, block: BlockMatrix) -> ProbabilityMatrix:
    """P_ij = gamma * B[labels[i], labels[j]] for all i, j (diagonal included)."""
    lab = labels.labels
    if lab.size and lab.max() >= block.K:
        raise ValueError(
            f"Label {int(lab.max())} out of range for a block matrix with K={block.K}"
        )
    values = block.gamma * block.entries[np.ix_(lab, lab)]
    return ProbabilityMatrix(values, labels)


def sample_directed(P: ProbabilityMatrix, rng: np.random.Generator) -> AdjacencyMatrix:
    """Independent Bernoulli(P_ij) for all i != j; A_ii = 0."""
    draws = rng.random((P.n, P.n))
    dense = (draws < P.values).astype(np.uint8)
    np.fill_diagonal(dense, 0)
    logger.debug(f"Sampled directed graph: n={P.n}, edges={int(dense.sum())}")
    return AdjacencyMatrix.from_dense(dense, directed=True)


def sample_undirected(P: ProbabilityMatrix, rng: np.random.Generator) -> AdjacencyMatrix:
    """For i < j, A_ij = A_ji ~ Bernoulli(P_ij); A_ii = 0."""
    upper = np.triu_indices(P.n, k=1)
    draws = rng.random(upper[0].size)
    dense = np.zeros((P.n, P.n), dtype=np.uint8)
    dense[upper] = draws < P.values[upper]
    dense |= dense.T
    logger.debug(f"Sampled undirected graph: n={P.n}, edges={int(dense.sum()) // 2}")
    return AdjacencyMatrix.from_dense(dense, directed=False)


def block_row_separation(block: BlockMatrix) -> float:
    """d_B* = min over row pairs of ||B_i. - B_j.||_2 (unscaled by gamma)."""
    if block.K < 2:
        raise ValueError("Row separation needs at least two communities")
    return float(pdist(block.entries).min())


def row_separation_P(P: ProbabilityMatrix) -> float:
    """d_P* = min Euclidean distance between distinct rows of P."""
    distinct = np.unique(P.values, axis=0)
    if distinct.shape[0] < 2:
        raise ValueError("Row separation needs at least two distinct rows")
    return float(pdist(distinct).min())


def write_edge_list(A: AdjacencyMatrix, path: Union[str, Path]) -> None:
    """Write ``# n=<n> directed=<0|1>`` then one ``i j`` line per edge (0-based).

    Undirected graphs list every edge once, with i < j.
    """
    coo = A.csr.tocoo()
    rows, cols = coo.row, coo.col
    if not A.directed:
        keep = rows < cols
        rows, cols = rows[keep], cols[keep]
    order = np.lexsort((cols, rows))
    lines = [f"# n={A.n} directed={int(A.directed)}"]
    lines.extend(f"{i} {j}" for i, j in zip(rows[order], cols[order]))
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to write edge list to {path}: {e}") from e
    logger.debug(f"Wrote {len(lines) - 1} edges to {path}")


def read_edge_list(path: Union[str, Path]) -> AdjacencyMatrix:
    """Parse the edge-list format written by :func:`write_edge_list`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to read edge list from {path}: {e}") from e

    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"Edge list {path} is empty")
    header = EDGE_LIST_HEADER.match(lines[0])
    if header is None:
        raise ValueError(f"Edge list {path} lacks the '# n=<n> directed=<0|1>' header")
    n, directed = int(header.group(1)), header.group(2) == "1"

    dense = np.zeros((n, n), dtype=np.uint8)
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-integer node index in {line!r}")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"{path}:{lineno}: node index out of range [0, {n})")
        if i == j:
            raise ValueError(f"{path}:{lineno}: self-loop on node {i}")
        dense[i, j] = 1
        if not directed:
            dense[j, i] = 1
    return AdjacencyMatrix.from_dense(dense, directed=directed)
