#!/usr/bin/env python3
"""Tests for probability floors, error bounds, separation and assumption checks."""

import math
import os
import sys

import numpy as np
import pytest

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sdsbm_lab.estimator import estimate
from sdsbm_lab.graph_model import (
    AdjacencyMatrix,
    BlockMatrix,
    CommunityProbs,
    LabelVector,
    ProbabilityMatrix,
    build_probability_matrix,
    sample_directed,
    sample_labels,
)
from sdsbm_lab.theory_bounds import (
    EpsilonSet,
    assumption_trend,
    check_assumptions,
    corollary_bounds,
    corollary_probability_floor,
    epsilon_conditions,
    gram_concentration_event,
    node_proportion_event,
    prob_ap,
    prob_cross,
    prob_pi,
    rate,
    row_error_event,
    separation,
    separation_floor,
    theorem1_bound,
)

DIAG_DOMINANT = BlockMatrix(np.where(np.eye(5, dtype=bool), 0.9, 0.6))
D_B_STAR = math.sqrt(2 * 0.09)


def fixed_eps(eps_m: float = 0.05, eps_ap: float = 0.05) -> EpsilonSet:
    return EpsilonSet(eps_pi=0.1, eps_ap=eps_ap, eps_m=eps_m, C_pi=1.0, C_rho=2.0)


def test_prob_pi():
    """Clamped at 0 for tiny n, tends to 1 for large eps, decreasing in K."""
    assert 1 - 2 * math.exp(-0.375) == pytest.approx(-0.3746, abs=1e-4)
    assert prob_pi(3, 1, 1.0) == 0.0
    assert prob_pi(10_000, 2, 50.0) == pytest.approx(1.0)
    assert prob_pi(1000, 4, 0.3) < prob_pi(1000, 2, 0.3)
    with pytest.raises(ValueError):
        prob_pi(2, 1, 1.0)
    with pytest.raises(ValueError):
        prob_pi(10, 1, 0.0)


def test_prob_ap():
    """Exponent 3.5267 at n = 100, eps = 0.5; vacuous at eps <= 4/n; monotone in eps and n."""
    exponent = 25 * 0.46**2 / 1.5
    assert exponent == pytest.approx(3.5267, abs=1e-4)
    assert prob_ap(100, 0.5) == max(0.0, 1 - 2e4 * math.exp(-exponent))
    with pytest.raises(ValueError):
        prob_ap(100, 0.04)

    grid = np.linspace(0.05, 3.0, 30)
    floors = [prob_ap(400, float(eps)) for eps in grid]
    assert all(later >= earlier for earlier, later in zip(floors, floors[1:]))

    trend = [prob_ap(n, 6 * rate(n)) for n in (10**2, 10**3, 10**4, 10**5, 10**6)]
    assert all(later >= earlier for earlier, later in zip(trend, trend[1:]))
    assert trend[-1] == pytest.approx(1.0)


def test_prob_cross():
    value = 1 - 100 * 99 * math.exp(-(25 * 0.25) / 1.5)
    assert prob_cross(100, 0.5) == max(0.0, min(1.0, value))
    assert prob_cross(10_000, 50.0) == pytest.approx(1.0)
    floors = [prob_cross(500, float(eps)) for eps in np.linspace(0.1, 3.0, 20)]
    assert all(later >= earlier for earlier, later in zip(floors, floors[1:]))
    assert all(0.0 <= f <= 1.0 for f in floors)
    with pytest.raises(ValueError):
        prob_cross(3, 0.5)


def test_theorem1_bound_variants():
    """Main bound 0.471667 at n = 400, |N| = 60; appendix adds 1/|N| + 8 eps_ap."""
    eps = fixed_eps()
    main, floor = theorem1_bound(400, 60, eps, K=5)
    assert main == pytest.approx(1 / 60 + 0.05 + 0.005 + 0.4, abs=1e-12)
    assert main == pytest.approx(0.471667, abs=1e-6)
    appendix, _ = theorem1_bound(400, 60, eps, K=5, variant="appendix")
    assert appendix == pytest.approx(main + 1 / 60 + 8 * 0.05, abs=1e-12)
    assert main <= appendix
    assert 0.0 <= floor <= 1.0

    tiny = EpsilonSet(eps_pi=1e-9, eps_ap=0.005, eps_m=1e-9, C_pi=1.0, C_rho=2.0)
    limit, _ = theorem1_bound(1000, 10**9, tiny, K=2)
    assert limit == pytest.approx(2 / 1000 + 8 * 0.005, rel=1e-6)
    assert limit > 2 / 1000

    with pytest.raises(ValueError):
        theorem1_bound(400, 0, eps, K=5)
    with pytest.raises(ValueError):
        theorem1_bound(400, 60, eps, K=5, variant="tight")  # type: ignore[arg-type]


def test_corollary_bounds():
    """(n log n)^(1/4) at n = 100 is about 4.6325; Frobenius is sqrt(n) times larger."""
    two_inf, frobenius = corollary_bounds(100, 1.0)
    assert two_inf == pytest.approx(4.6325, abs=1e-3)
    assert frobenius / two_inf == pytest.approx(10.0, abs=1e-12)
    assert corollary_bounds(200, 1.0)[0] > two_inf
    with pytest.raises(ValueError):
        corollary_bounds(100, 0.0)

    floors = [corollary_probability_floor(n, 5, 4.0, 6.0, 3.0) for n in (100, 1000, 10_000)]
    assert all(0.0 <= f <= 1.0 for f in floors)
    assert floors[-1] >= floors[0]


def test_epsilon_set_defaults():
    """C_1 defaults to 1/C_h + C_m + 2 + 16 C_ap = 102; C_rho is tight against rho_min."""
    eps = EpsilonSet.from_rates(600, 0.2)
    assert eps.C_1 == pytest.approx(102.0)
    assert eps.C_rho * rate(600) == pytest.approx(0.2)
    assert eps.C_pi == pytest.approx(eps.C_rho / 2)
    assert eps.eps_ap == pytest.approx(6 * rate(600))
    assert eps.eps_m == pytest.approx(3 * rate(600))
    with pytest.raises(ValueError):
        EpsilonSet.from_rates(600, 0.0)
    with pytest.raises(ValueError):
        EpsilonSet(eps_pi=0.1, eps_ap=-1.0, eps_m=0.1, C_pi=1.0, C_rho=2.0)


def test_separation():
    """S_n ~ 0.134164 and r ~ 1.6432 for the diagonal-dominant inputs at n = 600."""
    result = separation(1.0, 0.2, 0.424264, 600, K=5)
    assert result.S_n == pytest.approx(0.134164, abs=1e-6)
    assert result.r == pytest.approx(1.6432, abs=1e-4)
    assert result.r * 2 / math.sqrt(600) == pytest.approx(result.S_n, abs=1e-12)
    assert result.d_P_star_lower == pytest.approx(result.S_n * math.sqrt(600), abs=1e-12)
    assert result.E_min == pytest.approx(60.0)
    assert result.floor == separation_floor(5, result.L_n)
    assert 0.0 <= result.floor <= 1.0

    assert separation(0.0, 0.2, 0.424264, 600).S_n == 0.0
    assert separation(1.0, 0.2, 0.424264, 600).floor is None
    with pytest.raises(ValueError):
        separation(1.0, 0.0, 0.4, 600)


def test_check_assumptions_large_n_passes():
    """Fixed K and rho with distinct block rows pass all three checks at large n."""
    n = 10**6
    eps = EpsilonSet.from_rates(n, 0.2, C_1=0.1)
    report = check_assumptions(n, 5, CommunityProbs.uniform(5), 1.0, D_B_STAR, eps)
    assert report.all_passed
    assert [check.name for check in report.checks] == ["assumption_1", "assumption_2", "assumption_3"]


def test_check_assumptions_slacks():
    """Assumption 3 slack matches direct arithmetic; gamma = 0 fails it."""
    eps = EpsilonSet.from_rates(600, 0.2, C_1=0.1)
    report = check_assumptions(600, 5, 0.2, 1.0, 0.4243, eps)
    third = report.get("assumption_3")
    assert third is not None
    expected = 0.4243 * 0.2 - 8 * 0.01 * (math.log(600) / 600) ** 0.25
    assert third.slack == pytest.approx(expected, abs=1e-12)

    failed = check_assumptions(600, 5, 0.2, 0.0, 0.4243, eps).get("assumption_3")
    assert failed is not None and not failed.passed and failed.slack < 0

    second = report.get("assumption_2")
    assert second is not None
    assert second.slack == pytest.approx(600 * 0.04 / (8 * (1 + 0.2 / 6)) - math.log(100), abs=1e-12)

    with pytest.raises(ValueError):
        check_assumptions(600, 1, 1.0, 1.0, 0.4, eps)


def test_default_c1_fails_assumption_3():
    """The derived C_1 = 102 puts the third threshold far above any gamma d_B* rho_min <= 1."""
    eps = EpsilonSet.from_rates(1500, 0.2)
    third = check_assumptions(1500, 5, 0.2, 1.0, D_B_STAR, eps).get("assumption_3")
    assert third is not None and not third.passed


def test_epsilon_conditions():
    eps = EpsilonSet.from_rates(10**6, 0.2)
    checks = epsilon_conditions(10**6, eps)
    assert [check.name for check in checks] == ["condition_a", "condition_b"]
    assert all(check.passed for check in checks)


def test_assumption_trend():
    """Slacks of the second and third checks grow with n at fixed constants."""
    reports = []
    for n in (1000, 10_000, 100_000):
        eps = EpsilonSet.from_rates(n, 0.2, C_pi=0.5, C_rho=1.0, C_1=0.1)
        reports.append(check_assumptions(n, 5, 0.2, 1.0, D_B_STAR, eps))
    trend = assumption_trend(list(reversed(reports)))
    assert set(trend) == {"assumption_1", "assumption_2", "assumption_3"}
    assert trend["assumption_2"] and trend["assumption_3"]
    with pytest.raises(ValueError):
        assumption_trend([reports[0], reports[0]])


def test_node_proportion_event():
    labels = LabelVector(np.array([0, 0, 1, 1]), 2)
    rho = CommunityProbs.uniform(2)
    assert node_proportion_event(labels, rho, 0.2)
    assert not node_proportion_event(labels, rho, 0.1)


def test_gram_concentration_and_row_error_events():
    """Complete graph against P = 1: Gram deviations are 1/n on the diagonal and 2/n off it."""
    n = 10
    A = AdjacencyMatrix.from_dense(1 - np.eye(n, dtype=int))
    P = ProbabilityMatrix(np.ones((n, n)))
    assert gram_concentration_event(A, P, 3 / n)
    assert not gram_concentration_event(A, P, 1.5 / n)

    P_tilde = estimate(A, h=0.5)
    assert row_error_event(P, P_tilde, 1.0)
    assert not row_error_event(P, P_tilde, 0.0)


def test_empirical_concentration_meets_floors():
    """Concentration events at n = 200 occur at least as often as their floors whenever a floor exceeds 0.5."""
    n, replicates = 200, 200
    rho = CommunityProbs.uniform(5)
    eps = EpsilonSet.from_rates(n, rho.rho_min)
    rng = np.random.default_rng(20)
    pi_hits = ap_hits = 0
    for _ in range(replicates):
        labels = sample_labels(rho, n, rng)
        P = build_probability_matrix(labels, DIAG_DOMINANT)
        A = sample_directed(P, rng)
        pi_hits += node_proportion_event(labels, rho, eps.eps_pi)
        ap_hits += gram_concentration_event(A, P, eps.eps_ap)

    pi_floor = prob_pi(n, 5, eps.eps_pi)
    ap_floor = prob_ap(n, eps.eps_ap)
    if pi_floor > 0.5:
        assert pi_hits / replicates >= pi_floor
    if ap_floor > 0.5:
        assert ap_hits / replicates >= ap_floor
    assert ap_floor > 0.5


@pytest.mark.slow
def test_empirical_row_error_bound():
    """At n = 400 the appendix bound is violated in at most 1 - floor (and at most 5%) of replicates."""
    n, replicates = 400, 200
    rho = CommunityProbs.uniform(5)
    eps = EpsilonSet.from_rates(n, rho.rho_min)
    rng = np.random.default_rng(21)
    violations = 0
    floor = 0.0
    for _ in range(replicates):
        labels = sample_labels(rho, n, rng)
        P = build_probability_matrix(labels, DIAG_DOMINANT)
        P_tilde = estimate(sample_directed(P, rng))
        bound, floor = theorem1_bound(n, int(P_tilde.neighborhood_sizes.min()), eps, K=5, variant="appendix")
        violations += not row_error_event(P, P_tilde, bound)
    rate_violated = violations / replicates
    assert rate_violated <= 1 - floor
    assert rate_violated <= 0.05


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
