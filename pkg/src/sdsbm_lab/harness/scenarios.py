"""Simulation scenarios: community count, block pattern and sparsity factor as functions of n."""

import math
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, List, Tuple

import numpy as np

from ..graph_model import BlockMatrix, CommunityProbs


def star_pattern(K: int) -> np.ndarray:
    """Hub community 0: 0.90 at (0, 0), 0.90 - 0.01 k on the hub row and column, 0.85 elsewhere."""
    B = np.full((K, K), 0.85)
    B[0, 0] = 0.90
    offsets = 0.90 - 0.01 * np.arange(1, K)
    B[0, 1:] = offsets
    B[1:, 0] = offsets
    return B


def banded_pattern(K: int) -> np.ndarray:
    """0.5 within distance 1 of the diagonal, dropping by 0.1 per further step."""
    gap = np.abs(np.subtract.outer(np.arange(K), np.arange(K)))
    return np.where(gap <= 1, 0.5, 0.5 - 0.1 * (gap - 1))


def diag_dominant_pattern(K: int) -> np.ndarray:
    return np.where(np.eye(K, dtype=bool), 0.9, 0.6)


def sparse_two_block_pattern(K: int) -> np.ndarray:
    """Disassortative: 0.1 within, 0.3 across."""
    return np.where(np.eye(K, dtype=bool), 0.1, 0.3)


def dense(n: int) -> float:
    return 1.0


def sparse_gamma(n: int) -> float:
    """(log n / n)^{1/4}."""
    return (math.log(n) / n) ** 0.25


def _constant_k(K: int, n: int) -> int:
    return K


def fixed_k(K: int) -> Callable[[int], int]:
    return partial(_constant_k, K)


def growing_k(n: int) -> int:
    """floor(log n), capped at n // 10 for small n and never below 2."""
    return max(2, min(math.floor(math.log(n)), n // 10))


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    k_rule: Callable[[int], int]
    block_builder: Callable[[int], np.ndarray]
    gamma_rule: Callable[[int], float]
    directed: bool = True

    def with_direction(self, directed: bool) -> "ScenarioSpec":
        return replace(self, directed=directed)

    def build(self, n: int) -> Tuple[BlockMatrix, CommunityProbs, int]:
        """Block matrix, uniform community probabilities and K at size n."""
        if n < 3:
            raise ValueError(f"Scenario {self.name} needs n >= 3, got {n}")
        K = self.k_rule(n)
        if K > n:
            raise ValueError(f"Scenario {self.name} has K={K} > n={n}")
        block = BlockMatrix(self.block_builder(K), self.gamma_rule(n))
        if not block.has_distinct_rows():
            raise ValueError(f"Scenario {self.name} produced a block matrix with repeated rows")
        return block, CommunityProbs.uniform(K), K


SCENARIOS: Tuple[ScenarioSpec, ...] = (
    ScenarioSpec("star", "Five communities, hub at community 0", fixed_k(5), star_pattern, dense),
    ScenarioSpec("banded", "Five communities, banded connectivity", fixed_k(5), banded_pattern, dense),
    ScenarioSpec(
        "diag_dominant", "Five communities, 0.9 within / 0.6 across", fixed_k(5), diag_dominant_pattern, dense
    ),
    ScenarioSpec(
        "sparse_two_block",
        "Two disassortative communities, gamma = (log n / n)^(1/4)",
        fixed_k(2),
        sparse_two_block_pattern,
        sparse_gamma,
    ),
    ScenarioSpec("growing_k", "K = floor(log n) communities, star pattern", growing_k, star_pattern, dense),
)

SCENARIO_NAMES = tuple(spec.name for spec in SCENARIOS)


def scenario_registry() -> List[ScenarioSpec]:
    return list(SCENARIOS)


def get_scenario(name: str, directed: bool = True) -> ScenarioSpec:
    for spec in SCENARIOS:
        if spec.name == name:
            return spec.with_direction(directed)
    raise ValueError(f"Unknown scenario {name!r}; expected one of {', '.join(SCENARIO_NAMES)}")
