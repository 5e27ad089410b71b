"""
Block counts of the α-coalescent on a β grid.

The spatial coalescent is started on Λ^{α,t} from a Poisson, Bernoulli or
δ-thinned infinite configuration and observed at the times t^β. Its block
count at t^β is compared with the Kingman entrance law at log(β/α), drawn
as one path per replicate so that the joint law over the grid is matched.
"""

import math
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ...core.exceptions import InfeasibleScenarioError
from ...core.random import RandomStream
from ...kingman.coalescent import choose_truncation, entrance_path
from ...kingman.oracle import (
    ENTRANCE_ORACLE_SIZE,
    entrance_law,
    marginal_distribution,
    no_coalescence_probability,
)
from ...spatial.engine import evolve
from ...spatial.state import InitialConfig, init_configuration
from ...support.helpers import collect
from ...walks.walk import contained_in_annulus
from ..gates import entrance_stability
from ..scenario import ResultRecord, Scenario
from ..statistics import summarize
from .base import ScenarioDriver, StatisticKey

DEFAULT_INITIAL = {
    Scenario.THEOREM1: 'poisson',
    Scenario.THEOREM2: 'thinned',
    Scenario.THEOREM3: 'bernoulli',
    Scenario.THEOREM4: 'bernoulli',
    Scenario.MOMENT_BOUND: 'poisson',
}


def initial_config(driver: ScenarioDriver) -> InitialConfig:
    """Initial law of a scenario; the support is left to init_configuration."""
    config = driver.config
    kind = config.initial or DEFAULT_INITIAL[config.scenario]
    if kind == 'poisson':
        return InitialConfig.poisson(config.rho)
    if kind == 'bernoulli':
        return InitialConfig.bernoulli(config.p)
    return InitialConfig.infinite_thinned(config.delta)


def check_horizon(driver: ScenarioDriver, exponents: Sequence[float]) -> None:
    """
    Refuse observation times the default simulation region is not sized for.

    Raises:
        InfeasibleScenarioError: If some t^β exceeds t, or a thinned start
            is observed before its thinning time
    """
    config = driver.config
    if max(exponents) > 1:
        raise InfeasibleScenarioError(
            f"beta <= 1 (region safety bound for buffer {config.buffer} covers horizons up to t)"
        )
    kind = config.initial or DEFAULT_INITIAL.get(config.scenario)
    if kind == 'thinned' and config.t ** min(exponents) <= config.delta:
        raise InfeasibleScenarioError("t^beta > delta (observation after the thinning time)")


class CountingDriver(ScenarioDriver):
    """
    Convergence of #C^{α,t}_{t^β} to the entrance law at log(β/α).

    Serves the Poisson, δ-thinned infinite and Bernoulli starts.
    """

    scenario = Scenario.THEOREM1

    def validate(self) -> None:
        check_horizon(self, self.config.beta_grid)

    def prepare(self) -> None:
        config = self.config
        self.kernel = config.walk_kernel()
        self.times = [math.log(beta / config.alpha) for beta in config.beta_grid]
        self.truncation = config.truncation or choose_truncation(self.times[0], 1.0,
                                                                 config.tail_epsilon)
        distance = entrance_stability(self.times[0], self.truncation, config.gate_samples,
                                      self.auxiliary_stream())
        self.run_gate('entrance', distance, self.truncation)

    def evolve_counts(self, rng: RandomStream):
        """Yield (β, state) along the β grid for one fresh initial state."""
        config = self.config
        state = init_configuration(initial_config(self), config.t, config.alpha, rng,
                                   gamma=config.gamma, kernel=self.kernel, buffer=config.buffer,
                                   tail_epsilon=config.tail_epsilon)
        for beta in config.beta_grid:
            evolve(state, config.t ** beta, rng)
            yield beta, state

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        alpha = self.config.alpha
        records = [self.record(index, rng, 'count', state.block_count(), alpha=alpha, beta=beta)
                   for beta, state in self.evolve_counts(rng)]
        if self.limit_sample(index):
            path = entrance_path(self.times, 1.0, self.config.tail_epsilon, rng, self.truncation)
            records.extend(self.record(index, rng, 'limit_count', count, alpha=alpha, beta=beta)
                           for beta, count in zip(self.config.beta_grid, path))
        return records

    def pairs(self):
        return [('count', 'limit_count')]

    def limit_laws(self) -> Dict[StatisticKey, Mapping[Any, float]]:
        alpha = self.config.alpha
        return {('count', (alpha, beta, None)): entrance_law(s)
                for beta, s in zip(self.config.beta_grid, self.times)}

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        paths = _paths(records, 'count', self.config.beta_grid)
        monotone = [all(b <= a for a, b in zip(path, path[1:])) for path in paths]
        constant = [len(set(path)) == 1 for path in paths]

        # P{#K constant over the grid} = Σ_k P{#K_{s_1} = k}·P{no merge from k over s_m - s_1}
        law = marginal_distribution(ENTRANCE_ORACLE_SIZE, self.times[0])
        span = self.times[-1] - self.times[0]
        limit_constant = sum(float(p) * no_coalescence_probability(k + 1, span)
                             for k, p in enumerate(law))
        return {
            'monotone_fraction': float(np.mean(monotone)) if paths else math.nan,
            'constant_fraction': float(np.mean(constant)) if paths else math.nan,
            'limit_constant_probability': limit_constant,
            'truncation': self.truncation,
            'gates': dict(self.gates),
        }


class ThinnedCountingDriver(CountingDriver):
    scenario = Scenario.THEOREM2


class BernoulliCountingDriver(CountingDriver):
    scenario = Scenario.THEOREM3


class MomentBoundDriver(CountingDriver):
    """
    Mean block counts close above the diagonal β = α.

    mean(#C^{α,t}_{t^β})·2(β−α)/α should stay bounded over the grid. With
    the block cap N, the summary also holds P{#C ≤ N}, the mean count on
    {#C ≤ N}, the frequency with which the marks of at most N blocks lie in
    the annulus I_β(1, t), and P{#C ≥ N}, which should grow as β ↓ α.
    """

    scenario = Scenario.MOMENT_BOUND

    def prepare(self) -> None:
        self.kernel = self.config.walk_kernel()

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        records = []
        for beta, state in self.evolve_counts(rng):
            sites = [block.site for block in state.blocks.values()]
            contained = contained_in_annulus(sites, beta, 1.0, config.t)
            records.append(self.record(index, rng, 'count', state.block_count(),
                                       alpha=config.alpha, beta=beta))
            records.append(self.record(index, rng, 'contained', 1.0 if contained else 0.0,
                                       alpha=config.alpha, beta=beta))
        return records

    def pairs(self):
        return []

    def limit_laws(self):
        return {}

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        alpha, cap = self.config.alpha, self.config.block_cap
        scaled: Dict[str, float] = {}
        quantiles: Dict[str, int] = {}
        at_most: Dict[str, float] = {}
        at_least: Dict[str, float] = {}
        capped_mean: Dict[str, float] = {}
        capped_contained: Dict[str, float] = {}
        for beta in self.config.beta_grid:
            at_beta = collect(records).where('beta', beta)
            counts = dict(_by_replicate(at_beta.where('statistic', 'count')))
            contained = dict(_by_replicate(at_beta.where('statistic', 'contained')))
            values = list(counts.values())
            key = repr(beta)

            mean, _ = summarize(values)
            scaled[key] = mean * 2.0 * (beta - alpha) / alpha
            quantiles[key] = int(np.quantile(values, 0.95)) if values else 0

            capped = [replicate for replicate, count in counts.items() if count <= cap]
            at_most[key] = len(capped) / len(values) if values else math.nan
            at_least[key] = (sum(1 for count in values if count >= cap) / len(values)
                             if values else math.nan)
            capped_mean[key] = summarize([counts[r] for r in capped])[0]
            capped_contained[key] = summarize([contained[r] for r in capped if r in contained])[0]

        means = list(scaled.values())
        ratio = max(means) / min(means) if means and min(means) > 0 else math.inf
        trend = list(at_least.values())
        return {
            'scaled_means': scaled,
            'bound_ratio': ratio,
            'count_quantile_95': quantiles,
            'block_cap': cap,
            'at_most_cap': at_most,
            'capped_mean': capped_mean,
            'capped_contained': capped_contained,
            'at_least_cap': at_least,
            'at_least_cap_monotone': all(b <= a for a, b in zip(trend, trend[1:])),
        }


def _by_replicate(records) -> List[Tuple[int, float]]:
    return [(record.replicate, record.value) for record in records]


def _paths(records: Sequence[ResultRecord], statistic: str,
           grid: Sequence[float]) -> List[List[float]]:
    by_replicate: Dict[int, Dict[Optional[float], float]] = {}
    for record in records:
        if record.statistic == statistic:
            by_replicate.setdefault(record.replicate, {})[record.beta] = record.value
    return [[values[beta] for beta in grid] for _, values in sorted(by_replicate.items())
            if all(beta in values for beta in grid)]
