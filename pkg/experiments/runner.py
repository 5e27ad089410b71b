"""
Scenario runner.

Replicates run in a process pool; replicate k draws from its own stream
seeded with mix64(master_seed, k), so results do not depend on scheduling.
Records are sorted by (scenario, parameters, replicate, statistic) before
they are returned.
"""

import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..core.random import RandomStream
from ..support.helpers import collect
from .drivers.base import Parameters, ScenarioDriver, StatisticKey
from .registry import ScenarioRegistry, default_registry
from .scenario import ResultRecord, ScenarioConfig
from .statistics import compare_distributions, goodness_of_fit, summarize

logger = logging.getLogger('coalsim.experiments')

Progress = Callable[[int, int], None]

# driver of the worker process, installed by the pool initializer
_worker_driver: Optional[ScenarioDriver] = None


def _install_driver(driver: ScenarioDriver) -> None:
    global _worker_driver
    _worker_driver = driver


def run_replicate(driver: ScenarioDriver, index: int) -> List[ResultRecord]:
    """Run replicate index of a prepared driver on its own stream."""
    rng = RandomStream.for_replicate(driver.config.master_seed, index)
    return driver.replicate(index, rng)


def _pool_replicate(index: int) -> List[ResultRecord]:
    return run_replicate(_worker_driver, index)


@dataclass
class ScenarioRun:
    """A finished run: its prepared driver and sorted records."""

    config: ScenarioConfig
    driver: ScenarioDriver
    records: List[ResultRecord] = field(default_factory=list)

    def summary(self) -> Dict[str, Any]:
        return summarize_records(self.driver, self.records)


def execute(config: ScenarioConfig, threads: int = 1,
            registry: Optional[ScenarioRegistry] = None,
            progress: Optional[Progress] = None) -> ScenarioRun:
    """
    Validate, prepare and run a scenario.

    Args:
        config: Scenario configuration
        threads: Worker processes; 1 runs in-process
        registry: Driver registry, the built-in one by default
        progress: Called with (finished, total) after every replicate

    Returns:
        The finished run

    Raises:
        InfeasibleScenarioError: If the driver refuses the parameters
    """
    driver = (registry or default_registry()).make(config)
    driver.validate()
    driver.prepare()

    total = config.replicates
    logger.info(f"running scenario {config.scenario.value}",
                extra={'replicates': total, 'threads': threads, 'seed': config.master_seed})

    records: List[ResultRecord] = []
    if threads <= 1:
        for index in range(total):
            records.extend(run_replicate(driver, index))
            if progress:
                progress(index + 1, total)
    else:
        chunk = max(1, total // (threads * 8))
        with Pool(processes=threads, initializer=_install_driver, initargs=(driver,)) as pool:
            for done, batch in enumerate(pool.imap(_pool_replicate, range(total), chunk), start=1):
                records.extend(batch)
                if progress:
                    progress(done, total)

    records.sort(key=ResultRecord.sort_key)
    logger.info(f"scenario {config.scenario.value} finished", extra={'records': len(records)})
    return ScenarioRun(config, driver, records)


def run_scenario(config: ScenarioConfig, threads: int = 1) -> List[ResultRecord]:
    """Run a scenario and return its sorted records."""
    return execute(config, threads).records


def _parameter_suffix(parameters: Parameters) -> str:
    names = ('alpha', 'beta', 'u')
    parts = [f'{name}={value!r}' for name, value in zip(names, parameters) if value is not None]
    return f"[{','.join(parts)}]" if parts else ''


def statistic_name(key: StatisticKey) -> str:
    """Summary key of a statistic at one parameter set, e.g. count[alpha=0.3,beta=0.6]."""
    statistic, parameters = key
    return statistic + _parameter_suffix(parameters)


def _group(records: Sequence[ResultRecord]) -> Dict[StatisticKey, List[float]]:
    groups = collect(records).group_by(lambda record: (record.statistic, record.parameters()))
    return {key: group.values() for key, group in groups.items()}


def _entry(values: Sequence[float]) -> Dict[str, Any]:
    mean, stderr = summarize(values)
    return {'mean': mean, 'stderr': stderr, 'tv_vs_limit': None, 'chi2_p': None, 'limit': None}


def summarize_records(driver: ScenarioDriver, records: Sequence[ResultRecord]) -> Dict[str, Any]:
    """
    Summary of a run.

    Every statistic at every parameter set gets its mean and standard
    error. Simulated statistics paired with a limit statistic also get the
    total variation distance and chi-square p-value against the limit
    sample; statistics with an exact limit law are compared against it
    (as tv_vs_law and chi2_p_law when a paired sample exists too).
    """
    groups = _group(records)
    paired = dict(driver.pairs())
    laws = driver.limit_laws()
    limits = driver.limits()

    statistics: Dict[str, Dict[str, Any]] = {}
    for key in sorted(groups, key=_group_order):
        statistic, parameters = key
        values = groups[key]
        entry = _entry(values)

        partner = paired.get(statistic)
        if partner is not None and (partner, parameters) in groups:
            comparison = compare_distributions(values, groups[(partner, parameters)])
            entry['tv_vs_limit'] = comparison.total_variation
            entry['chi2_p'] = comparison.chi_square_p

        if key in laws:
            fit = goodness_of_fit(values, laws[key])
            if entry['tv_vs_limit'] is None:
                entry['tv_vs_limit'] = fit.total_variation
                entry['chi2_p'] = fit.chi_square_p
            else:
                entry['tv_vs_law'] = fit.total_variation
                entry['chi2_p_law'] = fit.chi_square_p

        if key in limits:
            entry['limit'] = limits[key]
        statistics[statistic_name(key)] = entry

    return {
        'scenario': driver.config.scenario.value,
        'replicates': driver.config.replicates,
        'seed': driver.config.master_seed,
        'statistics': statistics,
        'gates_failed': list(driver.failed_gates),
        'extras': driver.summary_extras(records),
    }


def _group_order(key: StatisticKey) -> Tuple[str, Tuple[float, ...]]:
    statistic, parameters = key
    return statistic, tuple(-math.inf if p is None else p for p in parameters)
