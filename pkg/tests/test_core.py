import pytest

import coalsim.core

from coalsim.core.exceptions import ContractViolation
from coalsim.core.lattice import (
    LatticeBox,
    Torus,
    rebirth_radius,
    simulation_radius,
    sup_distance,
    sup_norm,
    wrap_site,
)
from coalsim.core.partition import (
    Block,
    Individual,
    MarkedPartition,
    partial_order_leq,
    partition_code,
    restrict_by_index,
    restrict_by_region,
)
from coalsim.core.random import RandomStream, mix64


def _block(index, site, size=1, norm=None, members=None):
    norm = sup_norm(site) if norm is None else norm
    return Block(Individual(index), size, norm, site, 0.0, members)


class TestLattice:
    def test_norms(self):
        assert sup_norm((3, -5)) == 5
        assert sup_distance((1, 1), (-2, 3)) == 3

    def test_box_radius_and_count(self):
        box = LatticeBox(2.5)
        assert box.radius == 2
        assert box.site_count() == 25
        assert box.contains((2, -2))
        assert not box.contains((3, 0))

    def test_empty_box(self):
        box = LatticeBox(-1)
        assert box.radius == -1
        assert box.site_count() == 0
        assert box.sites() == []

    def test_alpha_box_absorbs_rounding(self):
        # 100^(1/2) is exactly 10 but t ** (alpha / 2) may land just below it
        assert LatticeBox.alpha_box(100.0, 1.0).radius == 10
        assert LatticeBox.alpha_box(1e4, 0.5).radius == 10

    def test_sites_are_shell_ordered(self):
        sites = LatticeBox(1).sites()
        assert sites[0] == (0, 0)
        assert len(sites) == 9
        assert all(sup_norm(s) == 1 for s in sites[1:])

    def test_torus_wraps(self):
        torus = Torus.around(2)
        assert torus.site_count() == 25
        assert torus.wrap((3, 0)) == (-2, 0)
        assert torus.wrap((-3, -3)) == (2, 2)
        assert torus.contains(torus.wrap((17, -11)))
        assert wrap_site(None, (17, -11)) == (17, -11)

    def test_torus_rejects_empty_extent(self):
        with pytest.raises(ContractViolation):
            Torus(0, 0, 0, 1)
        with pytest.raises(ContractViolation):
            Torus.around(-1)

    def test_region_radii(self):
        assert simulation_radius(100.0, 1.0) == 47  # ceil(10 * log 100)
        assert rebirth_radius(100.0, 1.0, 1.0, 1.0) == 20


class TestPartition:
    def test_individual_order_is_lexicographic(self):
        assert Individual(1, 5.0) < Individual(2, 0.0)
        assert Individual(2, 0.5) < Individual(2, 1.0)
        assert min([Individual(3), Individual(1, 2.0), Individual(1, 1.0)]) == Individual(1, 1.0)

    def test_merge_keeps_smaller_label_and_statistics(self):
        a = Block(Individual(4), 2, 3, (0, 0), 0.0, frozenset({Individual(4), Individual(7)}))
        b = Block(Individual(2), 1, 5, (0, 0), 0.0, frozenset({Individual(2)}))
        merged = a.merged_with(b)
        assert merged.label == Individual(2)
        assert merged.size == 3
        assert merged.min_initial_norm == 3
        assert merged.members == frozenset({Individual(2), Individual(4), Individual(7)})

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ContractViolation):
            MarkedPartition((_block(1, (0, 0)), _block(1, (1, 0))))

    def test_of_sorts_by_label(self):
        partition = MarkedPartition.of([_block(3, (0, 0)), _block(1, (2, 2))])
        assert partition.labels() == [Individual(1), Individual(3)]

    def test_restrict_by_region(self):
        partition = MarkedPartition.of([
            _block(1, (5, 5), norm=0),
            _block(2, (0, 0), norm=4),
            _block(3, (1, 1), norm=2),
        ])
        restricted = restrict_by_region(partition, LatticeBox(2))
        assert restricted.labels() == [Individual(1), Individual(3)]
        assert len(partition) == 3

    def test_restrict_by_region_is_monotone(self):
        partition = MarkedPartition.of([_block(k, (k, 0), norm=k) for k in range(6)])
        small = restrict_by_region(partition, LatticeBox(2))
        large = restrict_by_region(partition, LatticeBox(4))
        assert set(small.labels()) <= set(large.labels())
        assert restrict_by_region(partition, LatticeBox(-1)).blocks == ()

    def test_restrict_to_the_alpha_box(self):
        # Λ^{0.5,100} has radius ⌊100^{1/4}⌋ = 3
        partition = MarkedPartition.of([_block(k, (k, 0), norm=k) for k in range(6)])
        restricted = restrict_by_region(partition, LatticeBox.alpha_box(100.0, 0.5))
        assert restricted.labels() == [Individual(k) for k in range(4)]

    def test_restrict_by_index(self):
        blocks = [
            {Individual(1), Individual(2)},
            {Individual(3)},
            {Individual(4), Individual(5)},
        ]
        restricted = restrict_by_index(blocks, {1, 3, 5})
        assert restricted == frozenset({
            frozenset({Individual(1)}),
            frozenset({Individual(3)}),
            frozenset({Individual(5)}),
        })
        assert restrict_by_index(blocks, {1, 2}) == frozenset({frozenset({Individual(1), Individual(2)})})

    def test_partial_order(self):
        small = MarkedPartition.of([_block(1, (0, 0))])
        large = MarkedPartition.of([_block(1, (0, 0)), _block(2, (0, 0))])
        assert partial_order_leq(small, large)
        assert not partial_order_leq(large, small)
        assert coalsim.core.partial_order_leq is partial_order_leq

    def test_set_partition_requires_members(self):
        with pytest.raises(ContractViolation):
            MarkedPartition.of([_block(1, (0, 0))]).set_partition()

    def test_partition_code_ignores_block_order(self):
        universe = [Individual(k) for k in range(1, 5)]
        first = [{Individual(1), Individual(3)}, {Individual(2)}, {Individual(4)}]
        second = [{Individual(4)}, {Individual(3), Individual(1)}, {Individual(2)}]
        other = [{Individual(1), Individual(2)}, {Individual(3)}, {Individual(4)}]
        assert partition_code(first, universe) == partition_code(second, universe)
        assert partition_code(first, universe) != partition_code(other, universe)
        with pytest.raises(ContractViolation):
            partition_code([{Individual(1)}], universe)


class TestRandom:
    def test_mix64_is_deterministic_and_spreads(self):
        assert mix64(7, 0) == mix64(7, 0)
        seeds = {mix64(7, k) for k in range(1000)}
        assert len(seeds) == 1000
        assert all(0 <= s < 2 ** 64 for s in seeds)
        assert mix64(7, 0) != mix64(8, 0)

    def test_replicate_streams_reproduce(self):
        a = RandomStream.for_replicate(3, 11)
        b = RandomStream.for_replicate(3, 11)
        assert [a.uniform() for _ in range(5000)] == [b.uniform() for _ in range(5000)]
        assert a.seed == mix64(3, 11)

    def test_scalar_draws(self, rng):
        assert all(0 <= rng.below(7) < 7 for _ in range(2000))
        for _ in range(2000):
            a, b = rng.pair(3)
            assert a != b and 0 <= a < 3 and 0 <= b < 3
        draws = [rng.exponential(4.0) for _ in range(20000)]
        assert sum(draws) / len(draws) == pytest.approx(0.25, rel=0.05)

    def test_spawn_is_reproducible(self):
        assert RandomStream(1).spawn().uniform() == RandomStream(1).spawn().uniform()
