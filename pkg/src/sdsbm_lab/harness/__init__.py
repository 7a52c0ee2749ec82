"""Scenario registry, Monte-Carlo driver and result writers."""

from .report import emit_svg, read_records_csv, write_aggregates_csv, write_csv
from .runner import METHODS, ReplicateTask, aggregate, run_method, run_monte_carlo, run_replicate, run_scenarios
from .scenarios import SCENARIO_NAMES, ScenarioSpec, get_scenario, scenario_registry

__all__ = [
    # Scenarios
    "SCENARIO_NAMES",
    "ScenarioSpec",
    "get_scenario",
    "scenario_registry",
    # Monte-Carlo
    "METHODS",
    "ReplicateTask",
    "aggregate",
    "run_method",
    "run_monte_carlo",
    "run_replicate",
    "run_scenarios",
    # Output
    "emit_svg",
    "read_records_csv",
    "write_aggregates_csv",
    "write_csv",
]
