"""
Few-particle scenarios on the unbounded lattice.

A handful of particles starts at mutual distances of order t^{α/2}. The
sparse-recursion scenario observes their block count at t^β; the
exchangeability scenario compares the partition of the particles with the
one obtained after permuting their starting sites.
"""

import math
from collections import Counter
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from ...core.exceptions import InfeasibleScenarioError
from ...core.lattice import Site
from ...core.partition import Individual, partition_code
from ...core.random import RandomStream
from ...spatial.engine import evolve
from ...spatial.state import SpatialState
from ...support.helpers import collect
from ...walks.walk import contained_in_annulus
from ..scenario import ResultRecord, Scenario
from ..sparse import first_coalescence_limit, sparse_recursion_table
from ..statistics import goodness_of_fit
from .base import ScenarioDriver, StatisticKey


def starting_sites(t: float, alpha: float, particles: int) -> List[Site]:
    """Particles in a row, neighbours t^{α/2} apart."""
    spacing = max(1, int(round(t ** (alpha / 2.0))))
    return [(k * spacing, 0) for k in range(particles)]


def observation_delay(t: float, alpha: float) -> float:
    """g_α(t) = t^α·log³t, after which the partition is exchangeable."""
    return t ** alpha * math.log(t) ** 3


def partition_codes_by_shape(k: int) -> Dict[Tuple[int, ...], List[int]]:
    """
    Codes of all set partitions of k individuals, keyed by their block
    sizes in decreasing order. Codes match partition_code.
    """
    base = max(k, 2)
    shapes: Dict[Tuple[int, ...], List[int]] = {}

    def extend(prefix: List[int], used: int) -> None:
        if len(prefix) == k:
            code = 0
            for group in prefix:
                code = code * base + group
            sizes = tuple(sorted(Counter(prefix).values(), reverse=True))
            shapes.setdefault(sizes, []).append(code)
            return
        for group in range(used + 1):
            extend(prefix + [group], max(used, group + 1))

    extend([], 0)
    return shapes


class FewParticleDriver(ScenarioDriver):
    """Shared set-up of the few-particle scenarios."""

    def prepare(self) -> None:
        config = self.config
        self.kernel = config.walk_kernel()
        self.sites = starting_sites(config.t, config.alpha, config.particles)
        self.universe = [Individual(i, 0.0) for i in range(1, config.particles + 1)]

    def run(self, sites: Sequence[Site], until: float, rng: RandomStream) -> SpatialState:
        config = self.config
        state = SpatialState.from_sites(sites, gamma=config.gamma, kernel=self.kernel,
                                        track_members=True)
        return evolve(state, until, rng)


class SparseRecursionDriver(FewParticleDriver):
    """#C_{t^β} for N sparse particles against the recursion p_{N,·}(α/β)."""

    scenario = Scenario.SPARSE_RECURSION

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        state = self.run(self.sites, config.t ** config.beta, rng)
        count = state.block_count()
        return [
            self.record(index, rng, 'count', count, alpha=config.alpha, beta=config.beta),
            self.record(index, rng, 'all_separate', 1.0 if count == config.particles else 0.0,
                        alpha=config.alpha, beta=config.beta),
        ]

    def limit_laws(self) -> Dict[StatisticKey, Mapping[Any, float]]:
        config = self.config
        law = sparse_recursion_table(config.particles, config.alpha / config.beta)
        key = ('count', (config.alpha, config.beta, None))
        return {key: {k + 1: float(p) for k, p in enumerate(law)}}

    def limits(self) -> Dict[StatisticKey, float]:
        config = self.config
        key = ('all_separate', (config.alpha, config.beta, None))
        return {key: first_coalescence_limit(config.particles, config.alpha / config.beta)}


class ExchangeabilityDriver(FewParticleDriver):
    """
    Partitions of k particles from the original and the permuted starts.

    In the permuted run, particle i starts at the site particle
    permutation[i - 1] + 1 occupies in the original run. Both runs are
    observed at max(t^β, g_α(t)).
    """

    scenario = Scenario.EXCHANGEABILITY

    def validate(self) -> None:
        config = self.config
        sites = starting_sites(config.t, config.alpha, config.particles)
        if not contained_in_annulus(sites, config.alpha, 1.0, config.t):
            raise InfeasibleScenarioError("starting sites lie in I_alpha(1, t)")

    def prepare(self) -> None:
        super().prepare()
        config = self.config
        permutation = config.permutation or tuple(range(config.particles))
        self.permuted_sites = [self.sites[k] for k in permutation]
        self.horizon = max(config.t ** config.beta, observation_delay(config.t, config.alpha))

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        records = []
        for prefix, sites in (('', self.sites), ('permuted_', self.permuted_sites)):
            state = self.run(sites, self.horizon, rng)
            code = partition_code(state.partition().set_partition(), self.universe)
            records.append(self.record(index, rng, f'{prefix}partition', code,
                                       alpha=config.alpha, beta=config.beta))
            records.append(self.record(index, rng, f'{prefix}count', state.block_count(),
                                       alpha=config.alpha, beta=config.beta))
        return records

    def pairs(self):
        return [('partition', 'permuted_partition'), ('count', 'permuted_count')]

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        """
        Exchangeability within each block-size shape: the labelled partitions
        sharing a shape should be equally likely.
        """
        codes = [int(v) for v in collect(records).where('statistic', 'partition').values()]
        uniformity: Dict[str, Dict[str, float]] = {}
        for shape, members in partition_codes_by_shape(self.config.particles).items():
            sample = [code for code in codes if code in members]
            if len(members) < 2 or not sample:
                continue
            fit = goodness_of_fit(sample, {code: 1.0 / len(members) for code in members})
            uniformity['+'.join(map(str, shape))] = {
                'samples': len(sample), 'tv': fit.total_variation, 'chi2_p': fit.chi_square_p,
            }
        return {'observation_time': self.horizon, 'shape_uniformity': uniformity}
