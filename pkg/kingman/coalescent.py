"""
Kingman block-count processes.

The block count of a Kingman coalescent is a pure-death chain: from k blocks
it drops to k - 1 after an exponential time with rate pair_rate·k(k-1)/2.
Samples of the entrance law (the coalescent started from infinitely many
blocks) are drawn from a finite start N chosen by a Chernoff-type tail bound,
so that P{#K_duration > N} stays below a requested epsilon.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..core.exceptions import ContractViolation
from ..core.random import RandomStream

logger = logging.getLogger('coalsim.kingman')

MAX_TRUNCATION = 1_000_000
TAIL_SUM_TERMS = 20_000


@dataclass(frozen=True)
class CountPath:
    """
    Right-continuous step path of a block count.

    Attributes:
        start: Initial count
        jump_times: Times (from 0) at which the count drops by one
        duration: Length of the observation window
    """

    start: int
    jump_times: Sequence[float]
    duration: float

    def at(self, s: float) -> int:
        """Count at time s."""
        return self.start - bisect.bisect_right(self.jump_times, s)

    @property
    def final(self) -> int:
        return self.start - len(self.jump_times)

    def hitting_time(self, k: int) -> float:
        """First time the count is at most k, infinity if not reached."""
        drops = self.start - k
        if drops <= 0:
            return 0.0
        if drops > len(self.jump_times):
            return math.inf
        return self.jump_times[drops - 1]


def _death_rates(n0: int, pair_rate: float) -> np.ndarray:
    counts = np.arange(n0, 1, -1, dtype=float)
    return pair_rate * counts * (counts - 1.0) / 2.0


def simulate_block_count(n0: int, duration: float, pair_rate: float, rng: RandomStream) -> CountPath:
    """
    Simulate the pure-death path from n0 blocks over [0, duration].

    Raises:
        ContractViolation: If n0 < 1 or duration < 0
    """
    if n0 < 1:
        raise ContractViolation(f"block count needs n0 >= 1, got {n0}")
    if duration < 0:
        raise ContractViolation(f"duration must be non-negative, got {duration}")
    if n0 == 1 or pair_rate == 0:
        return CountPath(n0, (), duration)

    holding = rng.generator.standard_exponential(n0 - 1) / _death_rates(n0, pair_rate)
    times = np.cumsum(holding)
    kept = int(np.searchsorted(times, duration, side='right'))
    return CountPath(n0, tuple(float(s) for s in times[:kept]), duration)


def count_after(n0: int, duration: float, pair_rate: float, rng: RandomStream) -> int:
    """Block count at time duration, without materialising the path."""
    return simulate_block_count(n0, duration, pair_rate, rng).final


def tail_bound(n: int, duration: float, pair_rate: float = 1.0) -> float:
    """
    Chernoff bound on P{#K_duration > n} for the entrance law.

    Uses exp(-δθ + Σ_{k≥n} θ / (r_k - θ)) with r_k = k(k+1)/2 and
    θ = n log²n in Kingman time δ = duration·pair_rate. Returns 1 when the
    bound is not informative.
    """
    if n < 2:
        return 1.0
    delta = duration * pair_rate
    theta = n * math.log(n) ** 2
    if theta >= n * (n + 1) / 2.0:
        return 1.0

    k = np.arange(n, n + TAIL_SUM_TERMS, dtype=float)
    rates = k * (k + 1.0) / 2.0
    series = float(np.sum(theta / (rates - theta)))
    # remainder of the series beyond the summed terms, since r_k - θ ≈ k²/2
    series += 2.0 * theta / (n + TAIL_SUM_TERMS)

    exponent = -delta * theta + series
    return 1.0 if exponent >= 0 else math.exp(exponent)


def choose_truncation(duration: float, pair_rate: float, tail_epsilon: float) -> int:
    """
    Smallest start N whose tail bound is below tail_epsilon.

    Raises:
        ContractViolation: If the parameters are outside their ranges or no
            N up to MAX_TRUNCATION qualifies
    """
    if duration <= 0:
        raise ContractViolation(f"entrance law needs duration > 0, got {duration}")
    if not 0 < tail_epsilon < 1:
        raise ContractViolation(f"tail_epsilon must lie in (0, 1), got {tail_epsilon}")

    n = 2
    while n <= MAX_TRUNCATION:
        if tail_bound(n, duration, pair_rate) < tail_epsilon:
            return n
        n = n + 1 if n < 64 else int(n * 1.1)
    raise ContractViolation(f"no truncation up to {MAX_TRUNCATION} meets tail bound {tail_epsilon}"
                            f" at duration {duration}")


def entrance_count(duration: float, pair_rate: float, tail_epsilon: float, rng: RandomStream,
                   truncation: int = 0) -> int:
    """
    Sample the block count of the entrance law at time duration.

    Args:
        duration: Positive time since the start from infinitely many blocks
        pair_rate: Coalescence rate per pair
        tail_epsilon: Accepted truncation error
        rng: Random stream
        truncation: Explicit start N; chosen from the tail bound when 0

    Returns:
        A positive block count
    """
    if duration <= 0:
        raise ContractViolation(f"entrance law needs duration > 0, got {duration}")
    n = truncation or choose_truncation(duration, pair_rate, tail_epsilon)
    return count_after(n, duration, pair_rate, rng)


def entrance_path(times: Sequence[float], pair_rate: float, tail_epsilon: float,
                  rng: RandomStream, truncation: int = 0) -> List[int]:
    """
    Sample the entrance-law block counts jointly at increasing times.

    One realisation is read off at every time, so the returned counts are
    non-increasing.
    """
    if not times:
        return []
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ContractViolation("entrance path times must be strictly increasing")
    if times[0] <= 0:
        raise ContractViolation(f"entrance law needs positive times, got {times[0]}")
    n = truncation or choose_truncation(times[0], pair_rate, tail_epsilon)
    path = simulate_block_count(n, times[-1], pair_rate, rng)
    return [path.at(s) for s in times]


def truncation_stability(duration: float, pair_rate: float, truncation: int,
                         samples: int, rng: RandomStream) -> float:
    """
    Total variation between entrance samples started from N and 2N blocks.

    Used as a gate: a small value shows the truncation no longer matters.
    """
    from ..experiments.statistics import total_variation

    first = [count_after(truncation, duration, pair_rate, rng) for _ in range(samples)]
    second = [count_after(2 * truncation, duration, pair_rate, rng) for _ in range(samples)]
    distance = total_variation(first, second)
    logger.debug("entrance truncation stability",
                 extra={'truncation': truncation, 'duration': duration, 'tv': distance})
    return distance
