"""Scenario runner, CSV serialization, and the randomized invariant suite."""

from .config import RunConfig, load_config
from .csvio import read_csv, write_csv
from .properties import PropertyResult, SuiteReport, run_property_suite
from .scenarios import REGISTRY, Scenario, get_scenario, run_scenario, scenario_ids

__all__ = [
    "PropertyResult", "REGISTRY", "RunConfig", "Scenario", "SuiteReport",
    "get_scenario", "load_config", "read_csv", "run_property_suite",
    "run_scenario", "scenario_ids", "write_csv",
]
