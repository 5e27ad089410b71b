"""Scenario runs at a scale where the limit comparisons are informative."""

import math

import pytest

from coalsim.config.config import Config
from coalsim.core.lattice import LatticeBox, Torus
from coalsim.core.partition import partial_order_leq
from coalsim.core.random import RandomStream
from coalsim.experiments.registry import default_registry
from coalsim.experiments.runner import execute
from coalsim.experiments.scenario import Scenario, ScenarioConfig
from coalsim.experiments.statistics import goodness_of_fit
from coalsim.kingman.coalescent import count_after
from coalsim.kingman.oracle import marginal_distribution
from coalsim.kingman.rebirth import n_alpha, simulate_rebirth, simulate_rebirth_discrete
from coalsim.spatial.engine import evolve_coupled
from coalsim.spatial.state import InitialConfig, init_configuration, restrict_state, thin_state

pytestmark = pytest.mark.slow

P_FLOOR = 1e-4
THREADS = 4


def defaults(scenario, **changes):
    """Built-in parameters of a scenario with some of them replaced."""
    data = ScenarioConfig.defaults(scenario)
    data.update(changes)
    return ScenarioConfig.from_config(Config(data))


def statistics(config):
    return execute(config, threads=THREADS).summary()['statistics']


def test_entrance_law_is_dominated():
    config = ScenarioConfig(scenario=Scenario.POISSON_DOMINATION, delta=0.5, replicates=20000,
                            master_seed=0)
    summary = execute(config, threads=THREADS).summary()
    assert summary['extras']['dominated']
    assert summary['statistics']['entrance_count']['chi2_p'] > P_FLOOR


def test_lookdown_matches_the_spatial_coalescent():
    config = ScenarioConfig(scenario=Scenario.LOOKDOWN_CHECK, t=1.0, replicates=20000,
                            master_seed=0)
    summary = execute(config, threads=THREADS).summary()
    statistics = summary['statistics']
    assert statistics['spatial_partition']['chi2_p'] > P_FLOOR
    assert statistics['restriction_consistent']['mean'] == 1.0
    assert summary['extras']['rebirth_signature']['chi2_p'] > P_FLOOR


def test_sparse_particles_follow_the_recursion():
    config = ScenarioConfig(scenario=Scenario.SPARSE_RECURSION, t=1e4, alpha_grid=(0.5,),
                            beta_grid=(1.0,), particles=3, replicates=1000, master_seed=0)
    summary = execute(config, threads=THREADS).summary()
    assert summary['statistics']['count[alpha=0.5,beta=1.0]']['tv_vs_limit'] < 0.15


class TestErdosTaylor:
    # the no-meeting probability approaches α/β at a logarithmic rate
    @pytest.mark.parametrize('t, tolerance', [(1e4, 0.15), (1e6, 0.12)])
    def test_no_meeting_probability(self, t, tolerance):
        config = defaults(Scenario.ERDOS_TAYLOR, t=t)
        entry = statistics(config)['no_meeting[alpha=0.5,beta=1.0]']
        assert entry['mean'] == pytest.approx(entry['limit'], abs=tolerance)


class TestKingmanOracle:
    def test_simulated_counts_match_the_marginal_law(self):
        rng = RandomStream(0)
        sample = [count_after(5, math.log(4.0), 1.0, rng) for _ in range(100000)]
        law = {k + 1: float(p) for k, p in enumerate(marginal_distribution(5, math.log(4.0)))}
        assert goodness_of_fit(sample, law).chi_square_p > 0.01


class TestCountingScenarios:
    def test_poisson_start(self):
        config = defaults(Scenario.THEOREM1)
        summary = execute(config, threads=THREADS).summary()
        for beta in config.beta_grid:
            assert summary['statistics'][f'count[alpha=0.3,beta={beta!r}]']['tv_vs_limit'] <= 0.10
        assert summary['extras']['monotone_fraction'] == 1.0
        assert summary['gates_failed'] == []

    @pytest.mark.parametrize('scenario', [Scenario.THEOREM2, Scenario.THEOREM3])
    def test_thinned_and_bernoulli_starts(self, scenario):
        config = defaults(scenario)
        summary = execute(config, threads=THREADS).summary()
        for beta in config.beta_grid:
            assert summary['statistics'][f'count[alpha=0.3,beta={beta!r}]']['tv_vs_limit'] <= 0.12
        assert summary['extras']['monotone_fraction'] == 1.0

    def test_moment_bound_trend(self):
        summary = execute(defaults(Scenario.MOMENT_BOUND), threads=THREADS).summary()
        extras = summary['extras']
        assert extras['bound_ratio'] <= 3.0
        for contained in extras['capped_contained'].values():
            assert math.isnan(contained) or contained >= 0.9


class TestRebirthScenarios:
    def test_restricted_counts(self):
        stats = statistics(defaults(Scenario.THEOREM4))
        assert stats['count[alpha=0.4,beta=1.0]']['tv_vs_limit'] <= 0.12
        assert stats['count[alpha=0.7,beta=1.0]']['tv_vs_limit'] <= 0.12
        assert stats['count_difference[beta=1.0]']['tv_vs_limit'] <= 0.15

    def test_checkpoint_counts(self):
        # t = 1e4 needs about 8e7 jumps per replicate
        config = defaults(Scenario.THEOREM5, t=400.0, replicates=300)
        stats = statistics(config)
        for u in config.u_vector:
            assert stats[f'count[alpha=0.3,beta=1.0,u={u!r}]']['tv_vs_limit'] <= 0.3


class TestExchangeability:
    def test_permuted_starts_share_the_law(self):
        stats = statistics(defaults(Scenario.EXCHANGEABILITY))
        assert stats['count[alpha=0.3,beta=1.0]']['tv_vs_limit'] < 0.03
        assert stats['partition[alpha=0.3,beta=1.0]']['tv_vs_limit'] < 0.05


class TestInvariantSuites:
    def test_coupled_order_over_many_seeds(self):
        for seed in range(1000):
            rng = RandomStream(seed)
            large = init_configuration(InitialConfig.poisson(1.5), 30.0, 1.0, rng,
                                       region=Torus.around(8))
            small = thin_state(large, 0.5, rng)
            smallest = restrict_state(small, LatticeBox(2))
            states = evolve_coupled([smallest, small, large], 10.0, rng)
            partitions = [state.partition() for state in states]
            assert partial_order_leq(partitions[0], partitions[1])
            assert partial_order_leq(partitions[1], partitions[2])

    def test_discrete_rebirth_over_many_seeds(self):
        grid = [0.4, 0.55, 0.7]
        log_grid = [math.log(a) for a in grid]
        for seed in range(1000):
            state = simulate_rebirth(log_grid[0], log_grid[-1], 0.0, 25, 1.0, RandomStream(seed))
            discrete = simulate_rebirth_discrete(grid, 25, 1.0, state=state)
            assert list(discrete) == [n_alpha(state, s) for s in log_grid]

    @pytest.mark.parametrize('scenario', [Scenario.THEOREM1, Scenario.THEOREM2,
                                          Scenario.THEOREM3, Scenario.THEOREM4,
                                          Scenario.THEOREM5])
    def test_truncation_gates(self, scenario):
        # joint laws spread over many cells; 1e5 samples keep sampling noise below the tolerance
        driver = default_registry().make(defaults(scenario, gate_samples=100000))
        driver.prepare()
        assert driver.failed_gates == []
