from typing import Literal, Optional, Tuple

from pydantic import BaseModel

METHOD_NAMES = Literal["KMA", "KMP", "SPECTRAL", "DSCORE"]


# ==================== Monte-Carlo output ====================
class RunRecord(BaseModel):
    scenario: str
    """Scenario name, e.g. ``diag_dominant``."""

    directed: bool
    """Whether the graph was sampled as a directed network."""

    n: int
    """Number of nodes."""

    method: METHOD_NAMES
    """Community detection method that produced the labels."""

    replicate: int
    """Replicate index within (scenario, directed, n), starting at 0."""

    seed: int
    """Replicate seed derived from the master seed; reproduces the graph on its own."""

    ari: float
    """Adjusted Rand index against the true labels; NaN for error rows."""

    accuracy: float
    """Fraction of nodes matched under the best label permutation; NaN for error rows."""

    exact: bool
    """Whether every node was recovered up to a global relabeling."""

    elapsed_ms: int = 0
    """Wall-clock time of the method call, 0 when timing is disabled."""

    error: Optional[str] = None
    """Failure message when the method raised; such rows are skipped by aggregation."""

    @property
    def is_error(self) -> bool:
        return self.error is not None

    def sort_key(self) -> Tuple[str, bool, int, str, int]:
        """Canonical ordering of records in output files."""
        return (self.scenario, self.directed, self.n, self.method, self.replicate)


class AggregateRow(BaseModel):
    scenario: str
    """Scenario name."""

    directed: bool
    """Directedness of the ensemble."""

    n: int
    """Number of nodes."""

    method: METHOD_NAMES
    """Community detection method."""

    replicates: int
    """Successful replicates contributing to the statistics."""

    errors: int = 0
    """Replicates that ended in an error row."""

    mean_ari: float
    """Mean ARI over successful replicates; NaN when there are none."""

    sd_ari: float
    """Sample standard deviation of the ARI (divisor replicates - 1, 0 for a single replicate)."""

    exact_rate: float
    """Fraction of successful replicates with exact recovery."""

    mean_elapsed_ms: float
    """Mean method wall-clock time in milliseconds."""
