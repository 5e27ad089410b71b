"""Look-down construction against the event-driven simulators."""

from typing import Any, Dict, List, Sequence, Tuple

from ...core.partition import Individual, partition_code, restrict_by_index
from ...core.random import RandomStream
from ...lookdown.graph import (
    build_graph,
    coalescent_from_lookdown,
    rebirth_from_lookdown,
    size_signature,
)
from ...spatial.engine import evolve
from ...spatial.rebirth import RebirthState, evolve_rebirth
from ...spatial.state import SpatialState
from ..scenario import ResultRecord, Scenario
from ..statistics import compare_distributions
from .base import ScenarioDriver

SITES = ((0, 0), (0, 0), (1, 0), (1, 0))
# traces only move to smaller indices, so initial segments restrict pathwise
RESTRICTED_INDICES = (1, 2, 3)


class LookdownDriver(ScenarioDriver):
    """
    Four individuals on two neighbouring sites, read off at time t.

    Records the set partition from the look-down graph and from the spatial
    coalescent, the block sizes by label index from the look-down rebirth
    reading and from the spatial coalescent with rebirth, and whether
    restricting the graph to the first three indices commutes with reading
    off the partition.
    """

    scenario = Scenario.LOOKDOWN_CHECK

    def prepare(self) -> None:
        self.kernel = self.config.walk_kernel()
        self.indices = list(range(1, len(SITES) + 1))
        self.initial_sites = dict(zip(self.indices, SITES))
        self.universe = [Individual(i, 0.0) for i in self.indices]

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        t = config.t
        graph = build_graph(self.indices, self.initial_sites, t, config.gamma, self.kernel, rng)
        lookdown = coalescent_from_lookdown(graph, t).set_partition()
        lookdown_sizes = size_signature(rebirth_from_lookdown(graph, t))

        restricted = coalescent_from_lookdown(graph.restricted(RESTRICTED_INDICES), t)
        consistent = restricted.set_partition() == restrict_by_index(lookdown, RESTRICTED_INDICES)

        spatial = SpatialState.from_sites(SITES, gamma=config.gamma, kernel=self.kernel,
                                          track_members=True)
        spatial = evolve(spatial, t, rng).partition().set_partition()

        reborn = RebirthState.from_state(SpatialState.from_sites(SITES, gamma=config.gamma,
                                                                 kernel=self.kernel))
        reborn_sizes = size_signature(evolve_rebirth(reborn, [], t, rng).partition())

        records = [
            self.record(index, rng, 'lookdown_partition', partition_code(lookdown, self.universe)),
            self.record(index, rng, 'spatial_partition', partition_code(spatial, self.universe)),
            self.record(index, rng, 'restriction_consistent', 1.0 if consistent else 0.0),
        ]
        for position, (a, b) in enumerate(zip(lookdown_sizes, reborn_sizes), start=1):
            records.append(self.record(index, rng, f'lookdown_rebirth_size_{position}', a))
            records.append(self.record(index, rng, f'spatial_rebirth_size_{position}', b))
        return records

    def pairs(self):
        pairs = [('spatial_partition', 'lookdown_partition')]
        pairs.extend((f'spatial_rebirth_size_{k}', f'lookdown_rebirth_size_{k}')
                     for k in self.indices)
        return pairs

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        spatial = _signatures(records, 'spatial_rebirth_size_', len(self.indices))
        lookdown = _signatures(records, 'lookdown_rebirth_size_', len(self.indices))
        if not spatial or not lookdown:
            return {}
        comparison = compare_distributions(spatial, lookdown)
        return {
            'rebirth_signature': {
                'tv': comparison.total_variation,
                'chi2_p': comparison.chi_square_p,
                'cells': comparison.cells,
            },
        }


def _signatures(records: Sequence[ResultRecord], prefix: str, size: int) -> List[Tuple[int, ...]]:
    by_replicate: Dict[int, Dict[str, int]] = {}
    for record in records:
        if record.statistic.startswith(prefix):
            by_replicate.setdefault(record.replicate, {})[record.statistic] = int(record.value)
    names = [f'{prefix}{k}' for k in range(1, size + 1)]
    return [tuple(values[name] for name in names)
            for _, values in sorted(by_replicate.items()) if all(n in values for n in names)]
