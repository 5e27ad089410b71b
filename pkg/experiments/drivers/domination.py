"""Stochastic domination of the entrance law by 1 + Poisson(ρ)."""

from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
from scipy.stats import poisson

from ...core.random import RandomStream
from ...kingman.coalescent import choose_truncation, entrance_count
from ...kingman.oracle import entrance_law, poisson_domination_rate
from ...support.helpers import collect
from ..scenario import ResultRecord, Scenario
from ..statistics import binomial_stderr, empirical_tail
from .base import ScenarioDriver, StatisticKey

N_MAX = 30
SLACK_STDERRS = 3.0


class PoissonDominationDriver(ScenarioDriver):
    """
    Samples #K_δ of the entrance law next to 1 + Poisson(ρ(δ)).

    The summary reports the largest excess of the empirical tail of #K_δ
    over the exact tail of 1 + Poisson(ρ), net of three binomial standard
    errors; domination holds when it is not positive.
    """

    scenario = Scenario.POISSON_DOMINATION
    uses_time = False

    def prepare(self) -> None:
        config = self.config
        self.rho = poisson_domination_rate(config.delta, n_max=N_MAX)
        self.truncation = config.truncation or choose_truncation(config.delta, 1.0,
                                                                 config.tail_epsilon)
        self.logger.info("poisson domination rate found",
                         extra={'delta': config.delta, 'rho': self.rho})

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        count = entrance_count(config.delta, 1.0, config.tail_epsilon, rng, self.truncation)
        bound = 1 + rng.poisson(self.rho)
        return [
            self.record(index, rng, 'entrance_count', count),
            self.record(index, rng, 'poisson_bound', bound),
        ]

    def limit_laws(self) -> Dict[StatisticKey, Mapping[Any, float]]:
        return {('entrance_count', (None, None, None)): entrance_law(self.config.delta)}

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        counts = [int(v) for v in collect(records).where('statistic', 'entrance_count').values()]
        if not counts:
            return {'rho': self.rho}
        empirical = empirical_tail(counts, N_MAX)
        n = np.arange(1, N_MAX + 1)
        dominating = poisson.sf(n - 2, self.rho)
        slack = np.array([SLACK_STDERRS * binomial_stderr(float(p), len(counts))
                          for p in dominating])
        excess = float(np.max(empirical - dominating - slack))
        return {
            'rho': self.rho,
            'max_excess': excess,
            'dominated': excess <= 0.0,
        }
