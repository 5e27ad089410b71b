"""
Base class for scenario drivers.

A driver owns everything a scenario needs: the feasibility check, the
one-off preparation of limit objects (truncations and their stability
gates), the per-replicate simulation and the description of which recorded
statistics are compared against which limit.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ...core.random import RandomStream, mix64
from ..gates import check_gate
from ..scenario import ResultRecord, Scenario, ScenarioConfig

Parameters = Tuple[Optional[float], Optional[float], Optional[float]]
StatisticKey = Tuple[str, Parameters]


class ScenarioDriver(ABC):
    """
    Base class for scenario drivers.

    Subclasses set `scenario` and implement `replicate`. The runner calls
    validate() and prepare() once, then replicate() for every replicate
    index, possibly in worker processes; replicate() must therefore depend
    on nothing but the prepared driver and its random stream.
    """

    scenario: Scenario
    uses_time = True

    def __init__(self, config: ScenarioConfig):
        """
        Initialize the driver.

        Args:
            config: Validated scenario configuration
        """
        self.config = config
        self.gates: Dict[str, float] = {}
        self.failed_gates: List[str] = []
        self.logger = logging.getLogger(f'coalsim.experiments.{config.scenario.value}')

    def validate(self) -> None:
        """
        Refuse infeasible parameter combinations.

        Raises:
            InfeasibleScenarioError: Naming the violated constraint
        """

    def prepare(self) -> None:
        """Derive truncations and run the truncation-stability gates."""

    @abstractmethod
    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        """
        Run one replicate.

        Args:
            index: Replicate index
            rng: The replicate's random stream, seeded with mix64(master_seed, index)

        Returns:
            The replicate's records
        """

    def run_gate(self, name: str, distance: float, truncation: int) -> bool:
        """Record a truncation-stability gate; a failed gate is listed under gates_failed."""
        self.gates[name] = distance
        passed = check_gate(name, distance, truncation)
        if not passed:
            self.failed_gates.append(name)
        return passed

    def auxiliary_stream(self, offset: int = 0) -> RandomStream:
        """Stream for gates and other one-off draws, disjoint from the replicate streams."""
        return RandomStream(mix64(self.config.master_seed, -1 - offset))

    def limit_sample(self, index: int) -> bool:
        """Whether replicate index also draws the limit-side sample."""
        limit_samples = self.config.limit_samples
        return limit_samples == 0 or index < limit_samples

    def pairs(self) -> List[Tuple[str, str]]:
        """(simulated statistic, limit statistic) pairs compared per parameter set."""
        return []

    def limits(self) -> Dict[StatisticKey, float]:
        """Deterministic limit targets of statistics."""
        return {}

    def limit_laws(self) -> Dict[StatisticKey, Mapping[Any, float]]:
        """Exact limit laws of statistics."""
        return {}

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        """Scenario-specific summary entries."""
        return {}

    def record(self, index: int, rng: RandomStream, statistic: str, value: float,
               alpha: Optional[float] = None, beta: Optional[float] = None,
               u: Optional[float] = None) -> ResultRecord:
        config = self.config
        return ResultRecord(
            scenario=config.scenario.value,
            t=config.t if self.uses_time else None,
            alpha=alpha,
            beta=beta,
            rho=config.rho,
            gamma=config.gamma,
            delta=config.delta,
            u=u,
            replicate=index,
            statistic=statistic,
            value=float(value),
            seed=rng.seed,
        )
