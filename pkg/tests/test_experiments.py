import csv
import dataclasses
import io
import json
import math

import pytest

from coalsim.config import Config
from coalsim.core.exceptions import InfeasibleScenarioError, UnknownScenarioError
from coalsim.core.partition import Individual, partition_code
from coalsim.core.random import RandomStream
from coalsim.experiments.drivers import (
    ErdosTaylorDriver,
    RebirthCheckpointDriver,
    SparseRecursionDriver,
)
from coalsim.experiments.drivers.sparse import partition_codes_by_shape
from coalsim.experiments.output import render_csv, render_summary, write_records, write_summary
from coalsim.experiments.registry import DRIVERS, ScenarioRegistry, default_registry
from coalsim.experiments.runner import execute, run_scenario, statistic_name
from coalsim.experiments.scenario import RECORD_FIELDS, ResultRecord, Scenario, ScenarioConfig
from coalsim.spatial.rebirth import label_persistence_holds
from coalsim.support.collection import RecordCollection
from coalsim.support.helpers import atomic_write, collect, format_float, json_safe


def erdos_taylor(**changes):
    data = dict(scenario=Scenario.ERDOS_TAYLOR, t=100.0, alpha_grid=(0.5,), beta_grid=(1.0,),
                replicates=20, master_seed=7)
    data.update(changes)
    return ScenarioConfig(**data)


def counting(**changes):
    data = dict(scenario=Scenario.THEOREM1, t=100.0, alpha_grid=(0.3,), beta_grid=(0.6, 0.8, 1.0),
                rho=1.0, initial='poisson', replicates=3, master_seed=1, truncation=50,
                gate_samples=50)
    data.update(changes)
    return ScenarioConfig(**data)


def record(**changes):
    data = dict(scenario='theorem1', t=100.0, alpha=0.3, beta=0.6, rho=1.0, gamma=1.0,
                delta=None, u=None, replicate=0, statistic='count', value=3.0, seed=11)
    data.update(changes)
    return ResultRecord(**data)


class TestRegistry:
    def test_every_scenario_has_a_driver(self):
        registry = default_registry()
        assert len(DRIVERS) == len(Scenario)
        for scenario in Scenario:
            assert registry[scenario.value].scenario is scenario
            assert scenario.command in registry

    def test_commands_are_aliases(self):
        registry = default_registry()
        assert 'sparse-recursion' in registry
        assert registry['sparse-recursion'] is SparseRecursionDriver
        assert registry['erdos_taylor'] is ErdosTaylorDriver

    def test_unknown_scenario(self):
        with pytest.raises(UnknownScenarioError):
            default_registry().driver_class('theorem9')

    def test_bind_and_make(self):
        registry = ScenarioRegistry()
        registry.bind('erdos_taylor', ErdosTaylorDriver)
        assert isinstance(registry.make(erdos_taylor()), ErdosTaylorDriver)
        assert 'theorem1' not in registry
        with pytest.raises(UnknownScenarioError):
            registry.make(counting())


class TestRunner:
    def test_runs_are_reproducible(self):
        first = run_scenario(erdos_taylor())
        second = run_scenario(erdos_taylor())
        assert first == second
        assert len(first) == 20

    def test_worker_pool_matches_in_process_run(self):
        config = erdos_taylor(replicates=8)
        assert run_scenario(config, threads=2) == run_scenario(config, threads=1)

    def test_seed_changes_the_streams(self):
        seeds = {r.seed for r in run_scenario(erdos_taylor(replicates=3))}
        other = {r.seed for r in run_scenario(erdos_taylor(replicates=3, master_seed=8))}
        assert len(seeds) == 3
        assert not seeds & other

    def test_records_are_sorted(self):
        records = run_scenario(counting())
        assert records == sorted(records, key=ResultRecord.sort_key)

    def test_counting_records(self):
        records = run_scenario(counting())
        assert len(records) == 6 * 3
        counts = collect(records).where('statistic', 'count')
        assert sorted(set(counts.pluck('beta'))) == [0.6, 0.8, 1.0]
        for replicate in range(3):
            path = [r.value for r in sorted(counts.where('replicate', replicate), key=lambda r: r.beta)]
            assert all(b <= a for a, b in zip(path, path[1:]))

    def test_limit_samples_cap_the_limit_side(self):
        records = run_scenario(counting(limit_samples=1))
        limit = collect(records).where('statistic', 'limit_count')
        assert set(limit.pluck('replicate')) == {0}
        assert len(limit) == 3

    def test_horizon_beyond_t_is_infeasible(self):
        with pytest.raises(InfeasibleScenarioError, match="beta <= 1"):
            execute(counting(beta_grid=(0.6, 1.2)))

    def test_progress_callback(self):
        calls = []
        execute(erdos_taylor(replicates=4), progress=lambda done, total: calls.append((done, total)))
        assert calls == [(1, 4), (2, 4), (3, 4), (4, 4)]


class TestSummary:
    def test_erdos_taylor_summary(self):
        run = execute(erdos_taylor(alpha_grid=(0.5,), beta_grid=(0.5,)))
        summary = run.summary()
        assert summary['scenario'] == 'erdos_taylor'
        assert summary['replicates'] == 20
        assert summary['seed'] == 7
        entry = summary['statistics']['no_meeting[alpha=0.5,beta=0.5]']
        assert entry['limit'] == 1.0
        assert 0.0 <= entry['mean'] <= 1.0
        assert entry['tv_vs_limit'] is None

    def test_counting_summary_compares_against_the_limit(self):
        summary = execute(counting()).summary()
        entry = summary['statistics']['count[alpha=0.3,beta=0.6]']
        assert 0.0 <= entry['tv_vs_limit'] <= 1.0
        assert 0.0 <= entry['chi2_p'] <= 1.0
        assert 'chi2_p_law' in entry
        assert 'limit_count[alpha=0.3,beta=1.0]' in summary['statistics']
        extras = summary['extras']
        assert extras['truncation'] == 50
        assert 0.0 <= extras['monotone_fraction'] <= 1.0
        assert extras['monotone_fraction'] == 1.0
        assert 0.0 < extras['limit_constant_probability'] < 1.0

    def test_sparse_recursion_summary(self):
        config = ScenarioConfig(scenario=Scenario.SPARSE_RECURSION, t=100.0, alpha_grid=(0.5,),
                                beta_grid=(1.0,), particles=3, replicates=5, master_seed=2)
        summary = execute(config).summary()
        assert summary['statistics']['all_separate[alpha=0.5,beta=1.0]']['limit'] == \
            pytest.approx(0.125)
        assert summary['statistics']['count[alpha=0.5,beta=1.0]']['tv_vs_limit'] is not None

    def test_poisson_domination_has_no_time(self):
        config = ScenarioConfig(scenario=Scenario.POISSON_DOMINATION, delta=0.5, replicates=50,
                                master_seed=3)
        run = execute(config)
        assert len(run.records) == 100
        assert all(r.t is None for r in run.records)
        extras = run.summary()['extras']
        assert extras['rho'] > 0
        assert 'dominated' in extras

    def test_lookdown_restriction_holds_pathwise(self):
        config = ScenarioConfig(scenario=Scenario.LOOKDOWN_CHECK, t=1.0, replicates=20,
                                master_seed=4)
        records = run_scenario(config)
        consistent = collect(records).where('statistic', 'restriction_consistent').values()
        assert consistent == [1.0] * 20

    def test_statistic_name(self):
        assert statistic_name(('count', (0.3, 0.6, None))) == 'count[alpha=0.3,beta=0.6]'
        assert statistic_name(('entrance_count', (None, None, None))) == 'entrance_count'

    def test_render_summary_is_strict_json(self):
        text = render_summary({'mean': math.nan, 'values': (1.0, math.inf)})
        assert json.loads(text) == {'mean': None, 'values': [1.0, None]}


class TestOutput:
    def test_csv_header_and_rows(self):
        text = render_csv([record(), record(replicate=1, value=2.5, beta=None)])
        rows = list(csv.reader(io.StringIO(text)))
        assert tuple(rows[0]) == RECORD_FIELDS
        assert rows[1] == ['theorem1', '100', '0.3', '0.6', '1', '1', '', '', '0', 'count', '3', '11']
        assert rows[2][3] == ''
        assert rows[2][10] == '2.5'

    def test_write_records_replaces_the_file(self, tmp_path):
        path = tmp_path / 'out' / 'records.csv'
        write_records([record()], path)
        write_records([], path)
        assert path.read_text(encoding='utf-8').strip() == ','.join(RECORD_FIELDS)
        assert [p.name for p in path.parent.iterdir()] == ['records.csv']

    def test_write_summary(self, tmp_path):
        path = write_summary({'scenario': 'theorem1', 'extras': {'tv': math.nan}},
                             tmp_path / 'summary.json')
        assert json.loads(path.read_text(encoding='utf-8')) == {'scenario': 'theorem1',
                                                                 'extras': {'tv': None}}

    def test_atomic_write(self, tmp_path):
        path = atomic_write(tmp_path / 'a.txt', 'first')
        atomic_write(path, 'second')
        assert path.read_text(encoding='utf-8') == 'second'

    @pytest.mark.parametrize('value, text', [
        (None, ''), (True, '1'), (3, '3'), (3.0, '3'), (0.1, '0.1'),
        (math.inf, 'inf'), (math.nan, 'nan'), (1e20, '1e+20'),
    ])
    def test_format_float(self, value, text):
        assert format_float(value) == text

    def test_json_safe(self):
        assert json_safe({1: [math.nan, 2.0]}) == {'1': [None, 2.0]}


class TestRecordCollection:
    def test_where_and_operators(self):
        records = collect([record(beta=0.6), record(beta=0.8), record(beta=1.0, statistic='x')])
        assert len(records.where('statistic', 'count')) == 2
        assert records.where('beta', '>', 0.7).pluck('beta') == [0.8, 1.0]
        assert len(records.where('beta', 'in', (0.6, 1.0))) == 2
        assert len(records.where('missing', 1)) == 0
        with pytest.raises(ValueError):
            records.where('beta', '~', 1)

    def test_group_by_keeps_first_seen_order(self):
        records = collect([record(replicate=1), record(replicate=0), record(replicate=1)])
        groups = records.group_by('replicate')
        assert list(groups) == [1, 0]
        assert isinstance(groups[1], RecordCollection)
        assert len(groups[1]) == 2

    def test_values_and_iteration(self):
        records = collect([record(value=1.0), record(value=2.0)])
        assert records.values() == [1.0, 2.0]
        assert [r.value for r in records] == [1.0, 2.0]
        assert records[1].value == 2.0


def by_replicate(records, statistic):
    """{replicate: [values in record order]} of one statistic."""
    values = {}
    for r in records:
        if r.statistic == statistic:
            values.setdefault(r.replicate, []).append(r.value)
    return values


class TestGates:
    def test_failed_gates_are_listed(self):
        run = execute(counting(beta_grid=(0.6,), replicates=1, truncation=1, gate_samples=200))
        assert run.driver.failed_gates == ['entrance']
        summary = run.summary()
        assert summary['gates_failed'] == ['entrance']
        assert summary['extras']['gates']['entrance'] > 0.3

    def test_scenarios_without_gates(self):
        assert execute(erdos_taylor(replicates=2)).summary()['gates_failed'] == []


class TestScenarioDrivers:
    def test_thinned_start(self):
        config = counting(scenario=Scenario.THEOREM2, beta_grid=(0.35, 0.6, 1.0), rho=None,
                          delta=0.5, initial='thinned', master_seed=5, truncation=30,
                          gate_samples=30)
        run = execute(config)
        assert len(run.records) == 3 * 3 * 2
        for path in by_replicate(run.records, 'count').values():
            assert len(path) == 3
            assert all(b <= a for a, b in zip(path, path[1:]))
            assert path[-1] >= 1
        summary = run.summary()
        assert summary['extras']['monotone_fraction'] == 1.0
        assert 0.0 <= summary['statistics']['count[alpha=0.3,beta=0.35]']['tv_vs_limit'] <= 1.0

    def test_bernoulli_start_fills_the_box(self):
        config = counting(scenario=Scenario.THEOREM3, beta_grid=(0.35, 1.0), rho=None, p=1.0,
                          initial='bernoulli', master_seed=6, truncation=30, gate_samples=30)
        records = run_scenario(config)
        sites = 9  # Λ^{0.3,100} = [-1, 1]²
        for path in by_replicate(records, 'count').values():
            assert sites >= path[0] >= path[1] >= 1

    def test_alpha_process(self):
        config = ScenarioConfig(scenario=Scenario.THEOREM4, t=100.0, alpha_grid=(0.4, 0.7),
                                p=1.0, initial='bernoulli', replicates=3, master_seed=8,
                                truncation=20, gate_samples=30)
        run = execute(config)
        assert len(run.records) == 3 * 6
        counts = by_replicate(run.records, 'count')
        differences = by_replicate(run.records, 'count_difference')
        limits = by_replicate(run.records, 'limit_count')
        limit_differences = by_replicate(run.records, 'limit_difference')
        for replicate in range(3):
            small, large = counts[replicate]
            assert 0 <= small <= large
            assert differences[replicate] == [large - small]
            low, high = limits[replicate]
            assert 1 <= low <= high
            assert limit_differences[replicate] == [high - low]
        extras = run.summary()['extras']
        assert extras['truncation'] == 20
        assert 'rebirth' in extras['gates']

    def test_moment_bound_checks(self):
        config = ScenarioConfig(scenario=Scenario.MOMENT_BOUND, t=100.0, alpha_grid=(0.4,),
                                beta_grid=(0.45, 0.5, 0.55, 0.6), rho=1.0, initial='poisson',
                                replicates=5, master_seed=3, block_cap=3)
        run = execute(config)
        assert len(run.records) == 5 * 4 * 2
        contained = [r.value for r in run.records if r.statistic == 'contained']
        assert set(contained) <= {0.0, 1.0}

        extras = run.summary()['extras']
        assert extras['block_cap'] == 3
        assert extras['bound_ratio'] >= 1.0
        assert isinstance(extras['at_least_cap_monotone'], bool)
        for beta in ('0.45', '0.5', '0.55', '0.6'):
            at_most, at_least = extras['at_most_cap'][beta], extras['at_least_cap'][beta]
            assert 0.0 <= at_most <= 1.0
            assert at_most + at_least >= 1.0
            capped_mean = extras['capped_mean'][beta]
            assert math.isnan(capped_mean) or 1.0 <= capped_mean <= 3.0
            capped_contained = extras['capped_contained'][beta]
            assert math.isnan(capped_contained) or 0.0 <= capped_contained <= 1.0

    def test_exchangeability(self):
        config = ScenarioConfig(scenario=Scenario.EXCHANGEABILITY, t=100.0, alpha_grid=(0.3,),
                                beta_grid=(1.0,), particles=3, permutation=(1, 2, 0),
                                replicates=10, master_seed=6)
        run = execute(config)
        assert len(run.records) == 10 * 4
        codes = partition_codes_by_shape(3)
        blocks_of = {code: len(shape) for shape, members in codes.items() for code in members}
        for prefix in ('', 'permuted_'):
            partitions = by_replicate(run.records, f'{prefix}partition')
            counts = by_replicate(run.records, f'{prefix}count')
            for replicate, (code,) in partitions.items():
                assert counts[replicate] == [blocks_of[int(code)]]

        summary = run.summary()
        assert summary['extras']['observation_time'] == pytest.approx(
            100.0 ** 0.3 * math.log(100.0) ** 3)
        assert set(summary['extras']['shape_uniformity']) <= {'2+1'}
        for entry in summary['extras']['shape_uniformity'].values():
            assert 0.0 <= entry['chi2_p'] <= 1.0
        assert 'partition[alpha=0.3,beta=1.0]' in summary['statistics']

    def test_partition_codes_by_shape(self):
        assert partition_codes_by_shape(3) == {(3,): [0], (2, 1): [1, 3, 4], (1, 1, 1): [5]}
        assert sum(len(members) for members in partition_codes_by_shape(5).values()) == 52
        universe = [Individual(i) for i in (1, 2, 3)]
        pair = partition_code([[universe[0], universe[2]], [universe[1]]], universe)
        assert pair in partition_codes_by_shape(3)[(2, 1)]


def rebirth_config(**changes):
    data = dict(scenario=Scenario.THEOREM5, t=16.0, alpha_grid=(0.3,), u_vector=(0.5, 0.8),
                rho=1.0, buffer=1.0, replicates=3, master_seed=4, truncation=20, gate_samples=30)
    data.update(changes)
    return ScenarioConfig(**data)


class TestRebirthCheckpoints:
    def test_counts_grow_with_u(self):
        run = execute(rebirth_config())
        assert len(run.records) == 3 * 4
        for path in by_replicate(run.records, 'count').values():
            assert 0 <= path[0] <= path[1]
        for path in by_replicate(run.records, 'limit_count').values():
            assert 1 <= path[0] <= path[1]
        extras = run.summary()['extras']
        assert extras['region_radius'] == 5
        assert extras['events_per_replicate'] == pytest.approx(11 * 11 * 16.0)

    def test_labels_persist_along_the_driver_trajectory(self):
        driver = RebirthCheckpointDriver(rebirth_config())
        driver.validate()
        driver.prepare()
        for seed in range(10):
            state = driver.simulate(RandomStream(seed), track_members=True)
            assert len(state.snapshots) == 2
            assert label_persistence_holds(state)

    def test_snapshots_replay_the_replicate(self):
        driver = RebirthCheckpointDriver(rebirth_config())
        driver.prepare()
        dump = json.loads(driver.snapshots(0))
        assert [snapshot['checkpoint'] for snapshot in dump] == pytest.approx([4.0, 16.0 ** 0.8])
        entry = dump[0]['entries'][0]
        assert set(entry) == {'index', 'birth', 'x', 'y', 'in_box'}
        assert driver.snapshots(0) == driver.snapshots(0)

    def test_event_budget(self):
        config = ScenarioConfig.from_config(Config(ScenarioConfig.defaults(Scenario.THEOREM5)))
        RebirthCheckpointDriver(config).validate()
        with pytest.raises(InfeasibleScenarioError, match="jumps per replicate"):
            RebirthCheckpointDriver(dataclasses.replace(config, buffer=3.0)).validate()

    def test_instant_coalescence_is_refused(self):
        with pytest.raises(InfeasibleScenarioError, match="gamma < inf"):
            RebirthCheckpointDriver(rebirth_config(gamma=math.inf)).validate()
