"""K-means on matrix rows and the KMP pipeline (smooth, then cluster the estimated rows)."""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger
from scipy.spatial.distance import cdist

from .estimator import estimate
from .graph_model import AdjacencyMatrix, LabelVector, _frozen

SEEDING_METHODS = ("plus-plus", "random")

# Relative slack allowed when asserting that Lloyd iterations never raise the objective.
_MONOTONE_RTOL = 1e-9


@dataclass
class KMeansOptions:
    restarts: int = 10
    """Independent Lloyd runs; the lowest objective wins."""
    max_iters: int = 100
    """Lloyd iterations per run."""
    tolerance: float = 1e-8
    """Stop once the relative objective improvement falls below this."""
    seeding: str = "plus-plus"
    """Initial centroids: ``plus-plus`` (distance-squared weighted) or ``random``."""

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KMeansOptions":
        return cls(**{k: v for k, v in data.items() if k in cls.__annotations__})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> None:
        if self.restarts < 1:
            raise ValueError(f"kmeans.restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ValueError(f"kmeans.max_iters must be >= 1, got {self.max_iters}")
        if self.tolerance < 0:
            raise ValueError(f"kmeans.tolerance must be >= 0, got {self.tolerance}")
        if self.seeding not in SEEDING_METHODS:
            raise ValueError(
                f"kmeans.seeding must be one of {', '.join(SEEDING_METHODS)}, got {self.seeding!r}"
            )


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    labels: LabelVector
    centroids: np.ndarray
    objective: float
    iterations_used: int
    restart_chosen: int


def _seed_plus_plus(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = cdist(X, X[chosen], "sqeuclidean")[:, 0]
    while len(chosen) < K:
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every remaining point coincides with a chosen one
            idx = int(rng.choice(np.setdiff1d(np.arange(n), chosen)))
        chosen.append(idx)
        d2 = np.minimum(d2, cdist(X, X[[idx]], "sqeuclidean")[:, 0])
    return X[chosen].copy()


def _seed_random(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    return X[rng.choice(X.shape[0], size=K, replace=False)].copy()


def _repair_empty(labels: np.ndarray, dist: np.ndarray, K: int) -> np.ndarray:
    """Give each empty cluster the point farthest from its centroid, taken from a cluster of size >= 2."""
    labels = labels.copy()
    for c in range(K):
        counts = np.bincount(labels, minlength=K)
        if counts[c] > 0:
            continue
        own = dist[np.arange(labels.size), labels]
        own = np.where(counts[labels] >= 2, own, -np.inf)
        donor = int(np.argmax(own))
        logger.debug(f"Reseeding empty cluster {c} with point {donor}")
        labels[donor] = c
    return labels


def _centroids(X: np.ndarray, labels: np.ndarray, K: int) -> np.ndarray:
    sums = np.zeros((K, X.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, X)
    return sums / np.bincount(labels, minlength=K)[:, None]


def _objective(X: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    return float(((X - centroids[labels]) ** 2).sum())


def _compensated_objective(X: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    """Objective with each row sum and the total taken by fsum, independent of column order."""
    residuals = (X - centroids[labels]) ** 2
    return math.fsum(math.fsum(row) for row in residuals.tolist())


def _lloyd(X: np.ndarray, K: int, opts: KMeansOptions, rng: np.random.Generator):
    if opts.seeding == "plus-plus":
        centroids = _seed_plus_plus(X, K, rng)
    else:
        centroids = _seed_random(X, K, rng)

    labels: Optional[np.ndarray] = None
    objective = np.inf
    iterations = 0
    for iterations in range(1, opts.max_iters + 1):
        dist = cdist(X, centroids, "sqeuclidean")
        new_labels = _repair_empty(dist.argmin(axis=1), dist, K)
        centroids = _centroids(X, new_labels, K)
        new_objective = _objective(X, centroids, new_labels)

        if np.isfinite(objective) and new_objective > objective * (1 + _MONOTONE_RTOL) + 1e-12:
            raise RuntimeError(
                f"K-means objective increased from {objective!r} to {new_objective!r} "
                f"at iteration {iterations}"
            )

        unchanged = labels is not None and np.array_equal(labels, new_labels)
        small_step = np.isfinite(objective) and (
            objective - new_objective <= opts.tolerance * max(objective, np.finfo(float).tiny)
        )
        labels, objective = new_labels, new_objective
        if unchanged or small_step:
            break

    assert labels is not None
    return labels, centroids, objective, iterations


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel so clusters are numbered in order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    mapping = np.empty(int(labels.max()) + 1, dtype=np.int64)
    mapping[order] = np.arange(order.size)
    return mapping[labels]


def kmeans(
    rows,
    K: int,
    opts: Optional[KMeansOptions] = None,
    rng: Optional[np.random.Generator] = None,
) -> ClusteringResult:
    """Best-of-restarts Lloyd's algorithm on the rows of ``rows``.

    Restarts draw from independent children of ``rng``; ties on the objective
    go to the earliest restart. Labels are numbered by first appearance.
    """
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"K-means expects a 2-D matrix of rows, got shape {X.shape}")
    n = X.shape[0]
    if K < 2 or K > n:
        raise ValueError(f"K-means needs 2 <= K <= n, got K={K}, n={n}")
    opts = opts or KMeansOptions()
    opts.validate()
    rng = rng if rng is not None else np.random.default_rng()

    best = None
    for restart, child in enumerate(rng.spawn(opts.restarts)):
        labels, centroids, objective, iterations = _lloyd(X, K, opts, child)
        objective = _compensated_objective(X, centroids, labels)
        if best is None or objective < best[2]:
            best = (labels, centroids, objective, iterations, restart)
    assert best is not None

    labels, centroids, objective, iterations, restart = best
    relabeled = canonical_labels(labels)
    order = np.empty(K, dtype=np.int64)
    order[relabeled] = labels
    logger.debug(
        f"K-means: n={n}, K={K}, objective={objective:.6g}, "
        f"restart={restart}, iterations={iterations}"
    )
    return ClusteringResult(
        labels=LabelVector(relabeled, K),
        centroids=_frozen(centroids[order]),
        objective=objective,
        iterations_used=iterations,
        restart_chosen=restart,
    )


def kmp_pipeline(
    A: AdjacencyMatrix,
    K: int,
    h: Optional[float] = None,
    opts: Optional[KMeansOptions] = None,
    rng: Optional[np.random.Generator] = None,
    h_constant: float = 1.0,
) -> LabelVector:
    """Neighborhood-smoothing estimate of P, then K-means on its rows."""
    if A.n < 3:
        raise ValueError(f"KMP needs n >= 3, got {A.n}")
    P_tilde = estimate(A, h=h, h_constant=h_constant)
    return kmeans(P_tilde.values, K, opts, rng).labels
