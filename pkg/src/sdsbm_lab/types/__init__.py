"""Record types shared by the harness, the report writers and the CLI."""

from .assumptions import AssumptionCheck, AssumptionReport
from .records import METHOD_NAMES, AggregateRow, RunRecord

__all__ = [
    # Monte-Carlo output
    "METHOD_NAMES",
    "RunRecord",
    "AggregateRow",
    # Theory checks
    "AssumptionCheck",
    "AssumptionReport",
]
