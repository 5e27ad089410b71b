"""Kingman-type limit objects and their exact oracles."""

from .coalescent import (
    CountPath,
    choose_truncation,
    count_after,
    entrance_count,
    entrance_path,
    simulate_block_count,
    tail_bound,
    truncation_stability,
)
from .merging import MergingState, n_mer, simulate_merging
from .oracle import (
    entrance_law,
    entrance_tail,
    marginal_distribution,
    path_distribution,
    poisson_domination_rate,
)
from .rebirth import KingmanBlock, KingmanState, n_alpha, simulate_rebirth, simulate_rebirth_discrete

__all__ = [
    "CountPath",
    "simulate_block_count",
    "count_after",
    "tail_bound",
    "choose_truncation",
    "entrance_count",
    "entrance_path",
    "truncation_stability",
    "marginal_distribution",
    "entrance_law",
    "entrance_tail",
    "poisson_domination_rate",
    "path_distribution",
    "KingmanBlock",
    "KingmanState",
    "simulate_rebirth",
    "n_alpha",
    "simulate_rebirth_discrete",
    "MergingState",
    "simulate_merging",
    "n_mer",
]
