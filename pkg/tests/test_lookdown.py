import pytest

from coalsim.core.exceptions import ContractViolation
from coalsim.core.partition import Individual, restrict_by_index
from coalsim.core.random import RandomStream
from coalsim.lookdown.graph import (
    ArrowGraph,
    Trajectory,
    ancestor,
    build_graph,
    coalescent_from_lookdown,
    descendants,
    rebirth_from_lookdown,
    size_signature,
)

STILL = Trajectory((), ((0, 0),))
ELSEWHERE = Trajectory((), ((5, 5),))


def _graph(arrows, walks=None, horizon=1.0):
    indices = (1, 2, 3)
    walks = walks or {i: STILL for i in indices}
    return ArrowGraph(indices, walks, arrows, horizon, 1.0)


class TestAncestors:
    def test_no_arrows(self):
        graph = _graph({})
        assert ancestor(graph, 3, 0.0, 1.0) == 3
        partition = coalescent_from_lookdown(graph, 1.0)
        assert len(partition) == 3
        assert all(block.earliest_birth == 0.0 for block in rebirth_from_lookdown(graph, 1.0).blocks)

    def test_single_arrow(self):
        graph = _graph({(1, 2): (0.5,)})
        assert ancestor(graph, 2, 0.0, 0.4) == 2
        assert ancestor(graph, 2, 0.0, 0.6) == 1
        assert descendants(graph, 1, 0.0, 0.6) == {1, 2}

    def test_arrow_at_the_start_is_not_crossed(self):
        graph = _graph({(1, 2): (0.5,)})
        assert ancestor(graph, 2, 0.5, 1.0) == 2

    def test_two_arrow_chain(self):
        graph = _graph({(1, 2): (0.6,), (2, 3): (0.3,)})
        assert ancestor(graph, 3, 0.0, 1.0) == 1
        assert ancestor(graph, 3, 0.0, 0.5) == 2

    def test_chain_in_the_wrong_order_stops_early(self):
        graph = _graph({(1, 2): (0.3,), (2, 3): (0.6,)})
        assert ancestor(graph, 3, 0.0, 1.0) == 2

    def test_arrows_between_separated_walks_are_ignored(self):
        walks = {1: STILL, 2: ELSEWHERE, 3: STILL}
        graph = _graph({(1, 2): (0.5,)}, walks)
        assert graph.effective_arrows() == []
        assert ancestor(graph, 2, 0.0, 1.0) == 2

    def test_time_contract(self):
        graph = _graph({})
        with pytest.raises(ContractViolation):
            ancestor(graph, 1, 0.6, 0.5)
        with pytest.raises(ContractViolation):
            coalescent_from_lookdown(graph, 2.0)


class TestReadOff:
    def test_coalescent_partition(self):
        graph = _graph({(1, 2): (0.5,)})
        partition = coalescent_from_lookdown(graph, 1.0)
        assert partition.set_partition() == frozenset({
            frozenset({Individual(1), Individual(2)}),
            frozenset({Individual(3)}),
        })

    def test_rebirth_creates_an_individual_per_arrow(self):
        graph = _graph({(1, 2): (0.5,), (2, 3): (0.7,)})
        partition = rebirth_from_lookdown(graph, 1.0)
        assert len(partition) == 3
        assert partition.set_partition() == frozenset({
            frozenset({Individual(1), Individual(2)}),
            frozenset({Individual(2, 0.5), Individual(3)}),
            frozenset({Individual(3, 0.7)}),
        })
        assert size_signature(partition) == (2, 2, 1)

    def test_partitions_coarsen_in_time(self):
        rng = RandomStream(8)
        sites = {1: (0, 0), 2: (0, 0), 3: (1, 0), 4: (1, 0)}
        for _ in range(100):
            graph = build_graph([1, 2, 3, 4], sites, 2.0, 1.0, None, rng)
            counts = [len(coalescent_from_lookdown(graph, t)) for t in (0.0, 0.5, 1.0, 2.0)]
            assert all(a >= b for a, b in zip(counts, counts[1:]))
            assert len(rebirth_from_lookdown(graph, 2.0)) == 4

    def test_initial_segments_restrict_pathwise(self):
        rng = RandomStream(21)
        sites = {1: (0, 0), 2: (0, 0), 3: (1, 0), 4: (1, 0)}
        for _ in range(200):
            graph = build_graph([1, 2, 3, 4], sites, 1.0, 1.0, None, rng)
            full = coalescent_from_lookdown(graph, 1.0).set_partition()
            restricted = coalescent_from_lookdown(graph.restricted({1, 2, 3}), 1.0).set_partition()
            assert restricted == restrict_by_index(full, {1, 2, 3})

    def test_missing_start_site(self, rng):
        with pytest.raises(ContractViolation):
            build_graph([1, 2], {1: (0, 0)}, 1.0, 1.0, None, rng)
