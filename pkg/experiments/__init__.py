"""Monte Carlo scenario harness."""

from .output import render_csv, render_summary, write_records, write_summary
from .registry import ScenarioRegistry, default_registry
from .runner import ScenarioRun, execute, run_scenario, summarize_records
from .scenario import RECORD_FIELDS, ResultRecord, Scenario, ScenarioConfig
from .sparse import first_coalescence_limit, sparse_recursion_table
from .statistics import DistributionComparison, compare_distributions, goodness_of_fit

__all__ = [
    "Scenario",
    "ScenarioConfig",
    "ResultRecord",
    "RECORD_FIELDS",
    "ScenarioRegistry",
    "default_registry",
    "ScenarioRun",
    "execute",
    "run_scenario",
    "summarize_records",
    "render_csv",
    "render_summary",
    "write_records",
    "write_summary",
    "sparse_recursion_table",
    "first_coalescence_limit",
    "DistributionComparison",
    "compare_distributions",
    "goodness_of_fit",
]
