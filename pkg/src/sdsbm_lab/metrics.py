"""Clustering quality: adjusted Rand index, accuracy up to label permutation, exact recovery."""

import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph_model import LabelVector, _frozen

# Largest K for which the K! brute-force matching is offered.
EXHAUSTIVE_MAX_K = 12

Labels = Union[LabelVector, np.ndarray, list]


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    @property
    def row_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def column_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _as_labels(labels: Labels) -> np.ndarray:
    values = labels.labels if isinstance(labels, LabelVector) else np.asarray(labels)
    if values.ndim != 1:
        raise ValueError("Label vectors must be one-dimensional")
    if values.size and values.min() < 0:
        raise ValueError("Labels must be nonnegative")
    return values.astype(np.int64)


def _pair(true_labels: Labels, pred_labels: Labels):
    truth, pred = _as_labels(true_labels), _as_labels(pred_labels)
    if truth.size != pred.size:
        raise ValueError(f"Label vectors differ in length: {truth.size} vs {pred.size}")
    return truth, pred


def contingency_table(
    true_labels: Labels, pred_labels: Labels, K: Optional[int] = None
) -> ContingencyTable:
    """counts[a, b] = #{i : true(i) = a, pred(i) = b}; at least K x K when K is given."""
    truth, pred = _pair(true_labels, pred_labels)
    rows = max(int(truth.max(initial=-1)) + 1, K or 0)
    cols = max(int(pred.max(initial=-1)) + 1, K or 0)
    counts = np.zeros((rows, cols), dtype=np.int64)
    np.add.at(counts, (truth, pred), 1)
    return ContingencyTable(_frozen(counts))


def _pairs(x: np.ndarray) -> int:
    return int((x * (x - 1) // 2).sum())


def ari(true_labels: Labels, pred_labels: Labels) -> float:
    """Pair-counting adjusted Rand index; 1.0 when both partitions are trivial and equal."""
    truth, pred = _pair(true_labels, pred_labels)
    n = truth.size
    if n < 2:
        raise ValueError(f"ARI needs at least two labels, got {n}")
    table = contingency_table(truth, pred)
    index = _pairs(table.counts)
    sum_a = _pairs(table.row_marginals)
    sum_b = _pairs(table.column_marginals)
    total_pairs = n * (n - 1) // 2
    expected = sum_a * sum_b / total_pairs
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def matched_count(true_labels: Labels, pred_labels: Labels, K: Optional[int] = None) -> int:
    """Largest number of agreeing nodes over all relabelings of the prediction."""
    table = contingency_table(true_labels, pred_labels, K)
    rows, cols = linear_sum_assignment(table.counts, maximize=True)
    return int(table.counts[rows, cols].sum())


def exhaustive_matched_count(true_labels: Labels, pred_labels: Labels, K: int) -> int:
    """Brute-force counterpart of :func:`matched_count` over all K! permutations."""
    if K > EXHAUSTIVE_MAX_K:
        raise ValueError(f"Exhaustive matching is limited to K <= {EXHAUSTIVE_MAX_K}, got {K}")
    counts = contingency_table(true_labels, pred_labels, K).counts
    if counts.shape != (K, K):
        raise ValueError(f"Labels must lie in [0, {K})")
    index = np.arange(K)
    return max(int(counts[list(perm), index].sum()) for perm in itertools.permutations(range(K)))


def permutation_accuracy(true_labels: Labels, pred_labels: Labels, K: int) -> float:
    """max over label permutations of the fraction of agreeing nodes."""
    truth, pred = _pair(true_labels, pred_labels)
    if truth.size and (truth.max() >= K or pred.max() >= K):
        raise ValueError(f"Labels must lie in [0, {K})")
    if truth.size == 0:
        raise ValueError("Accuracy needs at least one label")
    return matched_count(truth, pred, K) / truth.size


def exact_recovery(true_labels: Labels, pred_labels: Labels, K: int) -> bool:
    """True iff some relabeling of the prediction matches every node (integer comparison)."""
    truth, pred = _pair(true_labels, pred_labels)
    if truth.size and (truth.max() >= K or pred.max() >= K):
        raise ValueError(f"Labels must lie in [0, {K})")
    return matched_count(truth, pred, K) == truth.size
