"""
Exact small-n oracles for the Kingman block count.

Marginals of the pure-death chain come from the matrix exponential of its
generator. They back the Poisson-domination search, the joint path law on a
time grid and the checked-in golden tables.
"""

import csv
import itertools
import math
from typing import Dict, Iterable, List, Sequence, TextIO, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.stats import poisson

from ..core.exceptions import ContractViolation, DominationSearchError, OracleScaleError

ORACLE_MAX_BLOCKS = 60

# P{#K_s >= n} of the entrance law is read off the chain started at this size.
ENTRANCE_ORACLE_SIZE = 60

# Oracle tails below this are numerical noise of the matrix exponential.
TAIL_FLOOR = 1e-14


def death_generator(n0: int, pair_rate: float = 1.0) -> np.ndarray:
    """Generator of the pure-death chain on {1..n0}; state k sits at position k-1."""
    generator = np.zeros((n0, n0))
    for k in range(2, n0 + 1):
        rate = pair_rate * k * (k - 1) / 2.0
        generator[k - 1, k - 1] = -rate
        generator[k - 1, k - 2] = rate
    return generator


def marginal_distribution(n0: int, s: float, pair_rate: float = 1.0) -> np.ndarray:
    """
    Law of the block count at time s, started from n0 blocks.

    Args:
        n0: Initial number of blocks, at most ORACLE_MAX_BLOCKS
        s: Non-negative time
        pair_rate: Coalescence rate per pair

    Returns:
        Array p with p[k-1] = P{count = k}, k = 1..n0

    Raises:
        OracleScaleError: If n0 exceeds the oracle scale
        ContractViolation: If n0 < 1 or s < 0
    """
    if n0 > ORACLE_MAX_BLOCKS:
        raise OracleScaleError(f"marginal oracle supports n0 <= {ORACLE_MAX_BLOCKS}, got {n0}")
    if n0 < 1:
        raise ContractViolation(f"marginal oracle needs n0 >= 1, got {n0}")
    if s < 0:
        raise ContractViolation(f"marginal oracle needs s >= 0, got {s}")

    if n0 == 1 or s == 0:
        law = np.zeros(n0)
        law[n0 - 1] = 1.0
        return law

    transition = expm(death_generator(n0, pair_rate) * s)
    law = np.clip(transition[n0 - 1], 0.0, None)
    return law


def entrance_tail(s: float, pair_rate: float = 1.0, n_max: int = 30) -> np.ndarray:
    """
    Tail P{#K_s >= n} of the entrance law for n = 1..n_max.

    Values below the oracle's numerical precision are reported as 0.
    """
    if s <= 0:
        raise ContractViolation(f"entrance tail needs s > 0, got {s}")
    law = marginal_distribution(ENTRANCE_ORACLE_SIZE, s, pair_rate)
    tail = np.cumsum(law[::-1])[::-1]
    tail = tail[:n_max]
    if tail.shape[0] < n_max:
        tail = np.concatenate([tail, np.zeros(n_max - tail.shape[0])])
    tail[tail < TAIL_FLOOR] = 0.0
    return tail


def poisson_domination_rate(duration: float, pair_rate: float = 1.0, n_max: int = 30,
                            grid_start: float = 1e-3, grid_ratio: float = 1.02,
                            grid_size: int = 800) -> float:
    """
    Smallest grid rate ρ with P{#K_duration >= n} <= P{1 + Poisson(ρ) >= n}.

    The inequality is required for every n in 1..n_max. The grid is
    grid_start·grid_ratio^k, k < grid_size.

    Raises:
        ContractViolation: If duration <= 0
        DominationSearchError: If no grid rate dominates
    """
    if duration <= 0:
        raise ContractViolation(f"Poisson domination needs duration > 0, got {duration}")

    kingman = entrance_tail(duration, pair_rate, n_max)
    n = np.arange(1, n_max + 1)
    for k in range(grid_size):
        rho = grid_start * grid_ratio ** k
        # P{1 + Poisson(ρ) >= n} = P{Poisson(ρ) > n - 2}
        dominating = poisson.sf(n - 2, rho)
        if np.all(kingman <= dominating + 1e-15):
            return float(rho)

    raise DominationSearchError(
        f"no Poisson rate up to {grid_start * grid_ratio ** (grid_size - 1):.4g} dominates the "
        f"block count at duration {duration}"
    )


def path_distribution(n0: int, times: Sequence[float], pair_rate: float = 1.0) -> Dict[Tuple[int, ...], float]:
    """
    Joint law of the block counts at increasing times, started from n0.

    Chains the marginals through the Markov property; outcomes with zero
    probability are omitted.
    """
    if any(b < a for a, b in zip(times, times[1:])):
        raise ContractViolation("path times must be non-decreasing")
    if times and times[0] < 0:
        raise ContractViolation(f"path times must be non-negative, got {times[0]}")

    laws: Dict[Tuple[int, ...], float] = {(): 1.0}
    previous_time = 0.0
    for time in times:
        step = time - previous_time
        transition = expm(death_generator(n0, pair_rate) * step) if step > 0 else np.eye(n0)
        extended: Dict[Tuple[int, ...], float] = {}
        for path, probability in laws.items():
            current = path[-1] if path else n0
            row = transition[current - 1]
            for k in range(1, current + 1):
                mass = probability * float(row[k - 1])
                if mass > 0:
                    extended[path + (k,)] = mass
        laws = extended
        previous_time = time
    return laws


def marginal_table(sizes: Iterable[int], times: Iterable[float],
                   pair_rate: float = 1.0) -> List[Tuple[int, float, int, float]]:
    """Rows (n0, s, k, probability) for every size and time."""
    rows = []
    for n0, s in itertools.product(sizes, times):
        law = marginal_distribution(n0, s, pair_rate)
        rows.extend((n0, s, k, float(law[k - 1])) for k in range(1, n0 + 1))
    return rows


def write_marginal_table(rows: Iterable[Tuple[int, float, int, float]], stream: TextIO) -> None:
    """Write oracle rows as CSV with columns n0, s, k, probability."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['n0', 's', 'k', 'probability'])
    for n0, s, k, probability in rows:
        writer.writerow([n0, repr(float(s)), k, repr(float(probability))])


def expected_count(n0: int, s: float, pair_rate: float = 1.0) -> float:
    """Mean block count at time s from n0."""
    law = marginal_distribution(n0, s, pair_rate)
    return float(np.dot(np.arange(1, n0 + 1), law))


def no_coalescence_probability(n0: int, s: float, pair_rate: float = 1.0) -> float:
    """P{no merge by time s} = exp(-pair_rate·C(n0,2)·s)."""
    return math.exp(-pair_rate * n0 * (n0 - 1) / 2.0 * s)


def entrance_law(s: float, pair_rate: float = 1.0) -> Dict[int, float]:
    """Law of the entrance-law block count at time s as {k: probability}."""
    if s <= 0:
        raise ContractViolation(f"entrance law needs s > 0, got {s}")
    law = marginal_distribution(ENTRANCE_ORACLE_SIZE, s, pair_rate)
    return {k + 1: float(p) for k, p in enumerate(law) if p > 0}
