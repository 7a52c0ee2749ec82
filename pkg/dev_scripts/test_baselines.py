#!/usr/bin/env python3
"""Tests for the truncated SVD and the KMA, spectral and d-score baselines."""

import math
import os
import sys

import numpy as np
import pytest

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sdsbm_lab.baselines import SvdConvergenceError, dscore, kma, ratio_embedding, spectral, truncated_svd
from sdsbm_lab.graph_model import (
    AdjacencyMatrix,
    BlockMatrix,
    CommunityProbs,
    LabelVector,
    build_probability_matrix,
    sample_directed,
    sample_labels,
    sample_undirected,
)
from sdsbm_lab.metrics import ari, exact_recovery

ASSORTATIVE = np.array([[0.9, 0.1], [0.1, 0.9]])


def strong_two_block(n: int, seed: int, directed: bool = True):
    rng = np.random.default_rng(seed)
    truth = sample_labels(CommunityProbs.uniform(2), n, rng)
    P = build_probability_matrix(truth, BlockMatrix(ASSORTATIVE))
    sampler = sample_directed if directed else sample_undirected
    return truth, sampler(P, rng)


def block_constant_adjacency(pattern: np.ndarray, sizes, seed: int):
    """Deterministic 0/1 adjacency A = pattern[pi, pi] with the diagonal cleared."""
    rng = np.random.default_rng(seed)
    K = pattern.shape[0]
    truth = LabelVector(rng.permutation(np.repeat(np.arange(K), sizes)), K)
    dense = pattern[np.ix_(truth.labels, truth.labels)].astype(np.uint8)
    np.fill_diagonal(dense, 0)
    return truth, AdjacencyMatrix.from_dense(dense)


def test_truncated_svd_matches_dense_decomposition():
    """Twenty random matrices with n <= 60: singular values within 1e-6 sigma_1, orthonormal columns."""
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(5, 61))
        K = int(rng.integers(1, min(n, 8) + 1))
        M = rng.random((n, n))
        result = truncated_svd(M, K, rng=rng)
        oracle = np.linalg.svd(M, compute_uv=False)[:K]
        sigma_1 = oracle[0]
        assert np.all(np.abs(result.singular_values - oracle) <= 1e-6 * sigma_1)
        assert np.all(np.diff(result.singular_values) <= 1e-12 * sigma_1)

        U, V = result.left_vectors, result.right_vectors
        assert np.abs(U.T @ U - np.eye(K)).max() <= 1e-8
        assert np.abs(V.T @ V - np.eye(K)).max() <= 1e-8
        for k in range(K):
            assert np.linalg.norm(M @ V[:, k] - result.singular_values[k] * U[:, k]) <= 1e-6 * sigma_1


def test_truncated_svd_rank_k_approximation():
    """sum sigma_k u_k v_k^T attains the best rank-K error of the dense decomposition."""
    rng = np.random.default_rng(1)
    M = rng.random((30, 30))
    K = 4
    result = truncated_svd(M, K, rng=rng)
    approx = (result.left_vectors * result.singular_values) @ result.right_vectors.T
    best = np.sqrt((np.linalg.svd(M, compute_uv=False)[K:] ** 2).sum())
    assert np.linalg.norm(M - approx) == pytest.approx(best, abs=1e-6)


def test_truncated_svd_low_rank_and_zero():
    """A two-community probability matrix has sigma_3 <= 1e-8 sigma_1; the zero matrix has sigma = 0."""
    truth = LabelVector(np.repeat([0, 1], [20, 25]), 2)
    P = build_probability_matrix(truth, BlockMatrix(np.array([[0.9, 0.6], [0.6, 0.9]])))
    result = truncated_svd(P.values, 3, rng=np.random.default_rng(2))
    assert result.singular_values[2] <= 1e-8 * result.singular_values[0]

    zero = truncated_svd(np.zeros((10, 10)), 3, rng=np.random.default_rng(3))
    assert np.all(zero.singular_values == 0)
    assert zero.residual == 0.0


def test_truncated_svd_sign_convention_and_errors():
    """Largest-magnitude entry of every left vector is positive; bad K and non-convergence raise."""
    M = np.random.default_rng(4).random((25, 25))
    result = truncated_svd(M, 3, rng=np.random.default_rng(4))
    U = result.left_vectors
    pivots = np.abs(U).argmax(axis=0)
    assert np.all(U[pivots, np.arange(3)] > 0)

    with pytest.raises(ValueError):
        truncated_svd(M, 0)
    with pytest.raises(ValueError):
        truncated_svd(M, 26)
    with pytest.raises(SvdConvergenceError) as info:
        truncated_svd(np.random.default_rng(5).random((80, 80)), 2, tol=1e-300, max_iters=1, oversample=0)
    assert info.value.iterations == 1
    assert info.value.residual > 0
    assert isinstance(info.value, RuntimeError)


def test_kma_identical_rows_and_zero_graph():
    """Groups of identical adjacency rows are recovered; the zero graph gives a valid deterministic labeling."""
    pattern = np.array([[0, 1, 1], [1, 0, 0], [1, 1, 0]])
    truth, A = block_constant_adjacency(pattern, [6, 6, 6], seed=6)
    labels = kma(A, 3, rng=np.random.default_rng(6))
    assert exact_recovery(truth, labels, 3)

    zero = AdjacencyMatrix.from_dense(np.zeros((12, 12), dtype=int))
    first = kma(zero, 3, rng=np.random.default_rng(7))
    second = kma(zero, 3, rng=np.random.default_rng(7))
    assert np.array_equal(first.labels, second.labels)
    assert first.K == 3


def test_spectral_noiseless_block_constant():
    """A rank-3 0/1 block pattern is recovered exactly."""
    pattern = np.array([[1, 0, 1], [0, 1, 1], [0, 0, 1]])
    truth, A = block_constant_adjacency(pattern, [12, 15, 10], seed=8)
    labels = spectral(A, 3, rng=np.random.default_rng(8))
    assert exact_recovery(truth, labels, 3)


def test_spectral_symmetric_input():
    """For an undirected graph the left and right singular vectors agree up to sign."""
    _, A = strong_two_block(100, seed=9, directed=False)
    result = truncated_svd(A, 2, rng=np.random.default_rng(9))
    alignment = np.abs(np.sum(result.left_vectors * result.right_vectors, axis=0))
    assert np.allclose(alignment, 1.0, atol=1e-8)


def test_spectral_and_dscore_strong_signal():
    """Two balanced assortative communities at n = 200 are recovered on most seeds."""
    hits = {"spectral": 0, "dscore": 0}
    for seed in range(5):
        truth, A = strong_two_block(200, seed=10 + seed)
        hits["spectral"] += exact_recovery(truth, spectral(A, 2, rng=np.random.default_rng(seed)), 2)
        hits["dscore"] += exact_recovery(truth, dscore(A, 2, rng=np.random.default_rng(seed)), 2)
    assert hits["spectral"] >= 4
    assert hits["dscore"] >= 4


def test_dscore_rejects_single_community():
    _, A = strong_two_block(30, seed=11)
    with pytest.raises(ValueError):
        dscore(A, 1)


def test_dscore_isolated_node():
    """A node with no edges has a zero leading entry; it still gets a finite, valid label."""
    truth, A = strong_two_block(60, seed=12)
    dense = A.dense()
    dense[5, :] = 0
    dense[:, 5] = 0
    isolated = AdjacencyMatrix.from_dense(dense)
    labels = dscore(isolated, 2, rng=np.random.default_rng(12))
    assert labels.n == 60
    assert set(np.unique(labels.labels)) <= {0, 1}


def test_ratio_embedding_clipping():
    """Ratios are finite and clipped, with zeros where the leading entry is degenerate."""
    vectors = np.array([[1e-15, 0.5], [0.01, 0.9], [0.5, -0.5]])
    ratios = ratio_embedding(vectors, clip=math.log(100))
    assert np.all(np.isfinite(ratios))
    assert ratios[0, 0] == 0.0
    assert ratios[1, 0] == pytest.approx(math.log(100))
    assert ratios[2, 0] == pytest.approx(-1.0)


def test_dscore_symmetric_ratios():
    """On an undirected graph the out- and in-ratio embeddings agree up to column signs."""
    _, A = strong_two_block(100, seed=13, directed=False)
    result = truncated_svd(A, 2, rng=np.random.default_rng(13))
    out_ratios = ratio_embedding(result.left_vectors, math.log(100))
    in_ratios = ratio_embedding(result.right_vectors, math.log(100))
    assert np.allclose(np.abs(out_ratios), np.abs(in_ratios), atol=1e-6)


def test_baselines_invariant_to_node_permutation():
    """Relabeling the nodes of A permutes the output labels and nothing else."""
    truth, A = strong_two_block(120, seed=14)
    perm = np.random.default_rng(14).permutation(120)
    permuted = AdjacencyMatrix.from_dense(A.dense()[np.ix_(perm, perm)])
    for method in (spectral, dscore):
        original = method(A, 2, rng=np.random.default_rng(15))
        shuffled = method(permuted, 2, rng=np.random.default_rng(15))
        restored = np.empty(120, dtype=np.int64)
        restored[perm] = shuffled.labels
        assert ari(original, restored) == 1.0


def test_baseline_outputs_are_valid_label_vectors():
    truth, A = strong_two_block(80, seed=16)
    for method in (kma, spectral, dscore):
        labels = method(A, 2, rng=np.random.default_rng(16))
        assert isinstance(labels, LabelVector)
        assert labels.n == 80 and labels.K == 2
        assert len(np.unique(labels.labels)) <= 2


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
