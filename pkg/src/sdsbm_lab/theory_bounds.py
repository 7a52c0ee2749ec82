"""Closed-form probability floors, error bounds and assumption checks for the smoothing estimator.

Every probability floor is clamped to [0, 1]. Asymptotic ("omega(1)")
conditions are evaluated as finite-n slacks; :func:`assumption_trend` checks
the direction of those slacks over a grid of n.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Literal, Optional, Tuple, Union

import numpy as np
from loguru import logger

from .estimator import EstimatedMatrix, gram, max_row_mse
from .graph_model import AdjacencyMatrix, CommunityProbs, LabelVector, ProbabilityMatrix
from .types import AssumptionCheck, AssumptionReport

DEFAULT_C_AP = 6.0
DEFAULT_C_M = 3.0
DEFAULT_C_H = 1.0

# Tolerance on the tight Assumption 1(a) comparison when C_rho is derived from rho_min.
_TIGHT_ATOL = 1e-12


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


def rate(n: int) -> float:
    """sqrt(log n / n), the common scale of every epsilon."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.sqrt(math.log(n) / n)


@dataclass(frozen=True)
class EpsilonSet:
    eps_pi: float
    eps_ap: float
    eps_m: float
    C_pi: float
    C_rho: float
    C_ap: float = DEFAULT_C_AP
    C_m: float = DEFAULT_C_M
    C_h: float = DEFAULT_C_H
    C_1: float = 1.0 / DEFAULT_C_H + DEFAULT_C_M + 2.0 + 16.0 * DEFAULT_C_AP
    C_2: float = 1.0

    def __post_init__(self):
        for name in ("eps_pi", "eps_ap", "eps_m", "C_pi", "C_rho", "C_ap", "C_m", "C_h", "C_1", "C_2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value}")

    @classmethod
    def from_rates(
        cls,
        n: int,
        rho_min: float,
        C_pi: Optional[float] = None,
        C_rho: Optional[float] = None,
        C_ap: float = DEFAULT_C_AP,
        C_m: float = DEFAULT_C_M,
        C_h: float = DEFAULT_C_H,
        C_1: Optional[float] = None,
        C_2: float = 1.0,
    ) -> "EpsilonSet":
        """Epsilons of the form C * sqrt(log n / n).

        ``C_rho`` defaults to the largest constant with rho_min >= C_rho sqrt(log n / n),
        ``C_pi`` to half of it, and ``C_1`` to 1/C_h + C_m + 2 + 16 C_ap.
        """
        if rho_min <= 0:
            raise ValueError(f"rho_min must be positive, got {rho_min}")
        r = rate(n)
        C_rho = rho_min / r if C_rho is None else C_rho
        C_pi = C_rho / 2.0 if C_pi is None else C_pi
        C_1 = 1.0 / C_h + C_m + 2.0 + 16.0 * C_ap if C_1 is None else C_1
        return cls(
            eps_pi=C_pi * r,
            eps_ap=C_ap * r,
            eps_m=C_m * r,
            C_pi=C_pi,
            C_rho=C_rho,
            C_ap=C_ap,
            C_m=C_m,
            C_h=C_h,
            C_1=C_1,
            C_2=C_2,
        )


@dataclass(frozen=True)
class SeparationQuantities:
    d_B_star: float
    d_P_star_lower: float
    S_n: float
    L_n: float
    E_min: float
    r: float
    floor: Optional[float] = None
    """1 - C(K, 2) K L_n, present when K was supplied."""


# ==================== Probability floors ====================


def prob_pi(n: int, K: int, eps_pi: float) -> float:
    """Floor on P(max_i |same-community fraction - rho_{pi(i)}| < eps_pi)."""
    if n < 3:
        raise ValueError(f"prob_pi needs n >= 3, got {n}")
    if eps_pi <= 0:
        raise ValueError(f"eps_pi must be positive, got {eps_pi}")
    return _clamp(1.0 - 2.0 * K * math.exp(-(0.25 * n * eps_pi**2) / (1.0 + eps_pi)))


def prob_ap(n: int, eps_ap: float) -> float:
    """Floor on P(max_ij |(A A^T / n)_ij - (P P^T / n)_ij| < eps_ap); vacuous for eps_ap <= 4/n."""
    if eps_ap <= 4.0 / n:
        raise ValueError(f"eps_ap must exceed 4/n = {4.0 / n:.6g}, got {eps_ap}")
    exponent = (0.25 * n * (eps_ap - 4.0 / n) ** 2) / (1.0 + eps_ap)
    return _clamp(1.0 - 2.0 * n**2 * math.exp(-exponent))


def prob_cross(n: int, eps_m: float) -> float:
    """Floor on the pairwise centered inner-product event at level eps_m."""
    if n < 4:
        raise ValueError(f"prob_cross needs n >= 4, got {n}")
    if eps_m <= 0:
        raise ValueError(f"eps_m must be positive, got {eps_m}")
    return _clamp(1.0 - n * (n - 1) * math.exp(-(0.25 * n * eps_m**2) / (1.0 + eps_m)))


def theorem1_bound(
    n: int,
    min_neighborhood: int,
    eps: EpsilonSet,
    K: int,
    variant: Literal["main", "appendix"] = "main",
    rho_min: Optional[float] = None,
    h: Optional[float] = None,
) -> Tuple[float, float]:
    """Row-wise bound on (1/n)||P-tilde_i. - P_i.||^2 and the probability it holds with.

    main:     1/|N| + eps_m + 2/n + 8 eps_ap
    appendix: 2/|N| + eps_m + 2/n + 16 eps_ap

    The floor is the union bound prob_pi + prob_ap + prob_cross - 2, clamped.
    When ``rho_min`` and ``h`` are given, eps_pi <= rho_min - h is checked and
    a violation is logged.
    """
    if min_neighborhood < 1:
        raise ValueError(f"min_neighborhood must be >= 1, got {min_neighborhood}")
    if variant == "main":
        bound = 1.0 / min_neighborhood + eps.eps_m + 2.0 / n + 8.0 * eps.eps_ap
    elif variant == "appendix":
        bound = 2.0 / min_neighborhood + eps.eps_m + 2.0 / n + 16.0 * eps.eps_ap
    else:
        raise ValueError(f"Unknown bound variant {variant!r}; expected 'main' or 'appendix'")

    if rho_min is not None and h is not None and eps.eps_pi > rho_min - h:
        logger.warning(
            f"eps_pi={eps.eps_pi:.4f} exceeds rho_min - h = {rho_min - h:.4f}; "
            f"the error bound is not guaranteed at n={n}"
        )

    floor = _clamp(prob_pi(n, K, eps.eps_pi) + prob_ap(n, eps.eps_ap) + prob_cross(n, eps.eps_m) - 2.0)
    return bound, floor


def corollary_bounds(n: int, C_1: float) -> Tuple[float, float]:
    """Thresholds C_1^{1/2} (n log n)^{1/4} on the (2,inf) error and that times sqrt(n) on Frobenius."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if C_1 <= 0:
        raise ValueError(f"C_1 must be positive, got {C_1}")
    two_inf = math.sqrt(C_1) * (n * math.log(n)) ** 0.25
    return two_inf, two_inf * math.sqrt(n)


def corollary_probability_floor(n: int, K: int, C_pi: float, C_ap: float, C_m: float) -> float:
    """Polynomial form 1 - 2K n^{-C_pi^2/4} - 2 n^{2 - C_ap^2/16} - n^{2 - C_m^2/4}, clamped."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    value = (
        1.0
        - 2.0 * K * n ** (-(C_pi**2) / 4.0)
        - 2.0 * n ** (2.0 - C_ap**2 / 16.0)
        - n ** (2.0 - C_m**2 / 4.0)
    )
    return _clamp(value)


# ==================== Separation ====================


def separation_floor(K: int, L_n: float) -> float:
    """Probability floor 1 - C(K, 2) K L_n for the row-separation event, clamped."""
    return _clamp(1.0 - math.comb(K, 2) * K * L_n)


def separation(
    gamma: float, rho_min: float, d_B_star: float, n: int, K: Optional[int] = None
) -> SeparationQuantities:
    """S_n = gamma sqrt(rho_min / 2) d_B*, the tail L_n and the exact-recovery radius r = S_n sqrt(n) / 2."""
    if gamma < 0 or d_B_star < 0:
        raise ValueError("gamma and d_B* must be nonnegative")
    if rho_min <= 0 or n < 1:
        raise ValueError(f"rho_min and n must be positive, got rho_min={rho_min}, n={n}")
    half = rho_min / 2.0
    S_n = gamma * math.sqrt(half) * d_B_star
    L_n = 2.0 * math.exp(-0.5 * half**2 * n / (1.0 + half / 3.0))
    E_min = n * half
    return SeparationQuantities(
        d_B_star=d_B_star,
        d_P_star_lower=gamma * math.sqrt(E_min) * d_B_star,
        S_n=S_n,
        L_n=L_n,
        E_min=E_min,
        r=S_n * math.sqrt(n) / 2.0,
        floor=separation_floor(K, L_n) if K is not None else None,
    )


# ==================== Assumptions ====================


def _rho_min(rho: Union[CommunityProbs, Iterable[float], float]) -> float:
    if isinstance(rho, CommunityProbs):
        return rho.rho_min
    if isinstance(rho, (int, float)):
        return float(rho)
    return float(np.min(np.asarray(list(rho), dtype=np.float64)))


def check_assumptions(
    n: int,
    K: int,
    rho: Union[CommunityProbs, Iterable[float], float],
    gamma: float,
    d_B_star: float,
    eps: EpsilonSet,
) -> AssumptionReport:
    """Evaluate the three model assumptions at a fixed n, with slacks (LHS - RHS).

    1: rho_min >= C_rho sqrt(log n / n), C_pi < C_rho and K n^{-C_pi^2/4} < 1
       (slack is the smallest of the three)
    2: n rho_min^2 / (8 (1 + rho_min / 6)) - log(K^2 (K - 1)) > 0
    3: gamma d_B* rho_min >= 8 C_1^2 (log n / n)^{1/4}
    """
    if K < 2:
        raise ValueError(f"Assumption checks need K >= 2, got {K}")
    rho_min = _rho_min(rho)
    if rho_min <= 0:
        raise ValueError(f"rho_min must be positive, got {rho_min}")
    r = rate(n)

    rho_slack = rho_min - eps.C_rho * r
    constant_slack = eps.C_rho - eps.C_pi
    count_slack = 1.0 - K * n ** (-(eps.C_pi**2) / 4.0)
    first = AssumptionCheck(
        name="assumption_1",
        passed=rho_slack >= -_TIGHT_ATOL and constant_slack > 0 and count_slack > 0,
        slack=min(rho_slack, constant_slack, count_slack),
        detail=(
            f"rho_min - C_rho*rate = {rho_slack:.6g}; C_rho - C_pi = {constant_slack:.6g}; "
            f"1 - K*n^(-C_pi^2/4) = {count_slack:.6g}"
        ),
    )

    second_slack = n * rho_min**2 / (8.0 * (1.0 + rho_min / 6.0)) - math.log(K**2 * (K - 1))
    second = AssumptionCheck(
        name="assumption_2",
        passed=second_slack > 0,
        slack=second_slack,
        detail="n*rho_min^2/(8(1+rho_min/6)) - log(K^2(K-1))",
    )

    third_slack = gamma * d_B_star * rho_min - 8.0 * eps.C_1**2 * (math.log(n) / n) ** 0.25
    third = AssumptionCheck(
        name="assumption_3",
        passed=third_slack >= 0,
        slack=third_slack,
        detail=f"gamma*d_B*rho_min - 8*C_1^2*(log n/n)^(1/4) with C_1={eps.C_1:.6g}",
    )
    return AssumptionReport(n=n, K=K, checks=[first, second, third])


def epsilon_conditions(n: int, eps: EpsilonSet) -> List[AssumptionCheck]:
    """Finite-n slacks of the two rate conditions on eps_ap and eps_m.

    (a) (n (eps_ap - 4/n)^2 / 4) / (1 + eps_ap) - 2 log n
    (b) (n eps_m^2 / 4) / (1 + eps_m) - 2 log n
    """
    log_n2 = 2.0 * math.log(n)
    a = (0.25 * n * (eps.eps_ap - 4.0 / n) ** 2) / (1.0 + eps.eps_ap) - log_n2
    b = (0.25 * n * eps.eps_m**2) / (1.0 + eps.eps_m) - log_n2
    return [
        AssumptionCheck(name="condition_a", passed=a > 0, slack=a, detail="eps_ap rate condition"),
        AssumptionCheck(name="condition_b", passed=b > 0, slack=b, detail="eps_m rate condition"),
    ]


def assumption_trend(reports: List[AssumptionReport]) -> Dict[str, bool]:
    """Per check name, whether the slack is nondecreasing as n increases."""
    ordered = sorted(reports, key=lambda report: report.n)
    if len({report.n for report in ordered}) != len(ordered):
        raise ValueError("Trend check needs reports at distinct n")
    names = [check.name for check in ordered[0].checks] if ordered else []
    trend: Dict[str, bool] = {}
    for name in names:
        slacks = []
        for report in ordered:
            check = report.get(name)
            if check is None:
                raise ValueError(f"Report at n={report.n} lacks check {name!r}")
            slacks.append(check.slack)
        trend[name] = all(later >= earlier for earlier, later in zip(slacks, slacks[1:]))
    return trend


# ==================== Empirical events ====================


def node_proportion_event(labels: LabelVector, rho: CommunityProbs, eps_pi: float) -> bool:
    """max_i |#{i' != i : same community} / (n - 1) - rho_{pi(i)}| < eps_pi."""
    if labels.n < 2:
        raise ValueError("Node proportions need n >= 2")
    sizes = labels.community_sizes()
    present = sizes > 0
    fractions = (sizes[present] - 1) / (labels.n - 1)
    return bool(np.abs(fractions - rho.rho[present]).max() < eps_pi)


def gram_concentration_event(A: AdjacencyMatrix, P: ProbabilityMatrix, eps_ap: float) -> bool:
    """max_ij |(A A^T / n)_ij - (P P^T / n)_ij| < eps_ap, diagonal included."""
    if A.n != P.n:
        raise ValueError(f"Dimension mismatch: A is {A.n}, P is {P.n}")
    expected = P.values @ P.values.T / P.n
    return bool(np.abs(gram(A).values - expected).max() < eps_ap)


def row_error_event(P: ProbabilityMatrix, P_tilde: EstimatedMatrix, bound: float) -> bool:
    """max_i (1/n)||P-tilde_i. - P_i.||^2 <= bound."""
    return max_row_mse(P, P_tilde) <= bound
