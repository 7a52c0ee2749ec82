from typing import List, Optional

from pydantic import BaseModel


class AssumptionCheck(BaseModel):
    name: str
    """Short identifier, e.g. ``assumption_1`` or ``condition_a``."""

    passed: bool
    """Whether the finite-n version of the condition holds."""

    slack: float
    """Left-hand side minus right-hand side; negative means violated."""

    detail: str = ""
    """Human-readable form of the inequality that was evaluated."""


class AssumptionReport(BaseModel):
    n: int
    """Number of nodes the conditions were evaluated at."""

    K: int
    """Number of communities."""

    checks: List[AssumptionCheck]
    """One entry per evaluated assumption, in a fixed order."""

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def get(self, name: str) -> Optional[AssumptionCheck]:
        return next((check for check in self.checks if check.name == name), None)
