"""
Merging coalescents.

m truncated Kingman copies start together at the first merge time. Pairs
within a copy always coalesce at rate 1; two copies start inter-coalescing
once the clock has passed both of their merge times. Labels of copy n are
k·m + n; the survivor of a merge is the minimum in (copy, rank) order.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence

from ..core.exceptions import ContractViolation
from ..core.random import RandomStream

logger = logging.getLogger('coalsim.kingman')


@dataclass
class MergingState:
    """
    Attributes:
        copies: Per copy, the labels of its live blocks
        clock: Current log-time
        merge_times: Increasing log merge times, one per copy
    """

    copies: List[List[int]]
    clock: float
    merge_times: Sequence[float]

    @property
    def m(self) -> int:
        return len(self.merge_times)

    def labels(self) -> List[int]:
        return sorted(label for copy in self.copies for label in copy)

    def __len__(self) -> int:
        return sum(len(copy) for copy in self.copies)

    def rank_key(self, label: int):
        return label % self.m, label // self.m


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


def simulate_merging(merge_log_times: Sequence[float], eval_log_time: float,
                     truncation_per_copy: int, rng: RandomStream,
                     pair_rate: float = 1.0) -> MergingState:
    """
    Run the merging coalescent up to eval_log_time.

    Args:
        merge_log_times: Non-decreasing merge times, one per copy
        eval_log_time: Time at which the state is returned
        truncation_per_copy: Initial blocks per copy
        rng: Random stream
        pair_rate: Rate per enabled pair

    Returns:
        The MergingState at eval_log_time
    """
    times = [float(s) for s in merge_log_times]
    if not times:
        raise ContractViolation("merging coalescent needs at least one copy")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ContractViolation("merge times must be non-decreasing")
    if times[0] > eval_log_time:
        raise ContractViolation(
            f"first merge time {times[0]} lies after the evaluation time {eval_log_time}"
        )
    if truncation_per_copy < 1:
        raise ContractViolation(f"truncation per copy must be >= 1, got {truncation_per_copy}")

    m = len(times)
    copies = [[k * m + n for k in range(truncation_per_copy)] for n in range(m)]
    state = MergingState(copies, times[0], tuple(times))

    # epochs between successive merge times; copies 0..enabled-1 inter-coalesce
    boundaries = times[1:] + [eval_log_time]
    clock = times[0]
    for enabled, epoch_end in enumerate(boundaries, start=1):
        epoch_end = min(epoch_end, eval_log_time)
        while clock < epoch_end:
            pooled = sum(len(copies[n]) for n in range(enabled))
            pool_pairs = _pairs(pooled)
            isolated = [_pairs(len(copies[n])) for n in range(enabled, m)]
            total_pairs = pool_pairs + sum(isolated)
            if total_pairs == 0 or pair_rate <= 0:
                clock = epoch_end
                break

            clock += rng.exponential(pair_rate * total_pairs)
            if clock >= epoch_end:
                clock = epoch_end
                break

            pick = rng.uniform() * total_pairs
            if pick < pool_pairs:
                _merge_in_pool(copies, enabled, pooled, m, rng)
            else:
                pick -= pool_pairs
                for offset, weight in enumerate(isolated):
                    if pick < weight or offset == len(isolated) - 1:
                        _merge_in_copy(copies[enabled + offset], rng)
                        break
                    pick -= weight
        if epoch_end >= eval_log_time:
            break

    state.clock = eval_log_time
    logger.debug("merging coalescent evaluated", extra={'copies': m, 'blocks': len(state)})
    return state


def _merge_in_copy(labels: List[int], rng: RandomStream) -> None:
    first, second = rng.pair(len(labels))
    winner = min(labels[first], labels[second])
    for position in sorted((first, second), reverse=True):
        last = labels.pop()
        if position < len(labels):
            labels[position] = last
    labels.append(winner)


def _merge_in_pool(copies: List[List[int]], enabled: int, pooled: int, m: int,
                   rng: RandomStream) -> None:
    first, second = rng.pair(pooled)
    located: Dict[int, tuple] = {}
    offset = 0
    for n in range(enabled):
        size = len(copies[n])
        for target in (first, second):
            if offset <= target < offset + size:
                located[target] = (n, target - offset)
        offset += size

    (n1, p1), (n2, p2) = located[first], located[second]
    a, b = copies[n1][p1], copies[n2][p2]
    winner = min(a, b, key=lambda label: (label % m, label // m))
    # remove the higher position first when both sit in one copy
    for n, p in sorted([(n1, p1), (n2, p2)], reverse=True):
        labels = copies[n]
        last = labels.pop()
        if p < len(labels):
            labels[p] = last
    copies[winner % m].append(winner)


def n_mer(state: MergingState, i: int) -> int:
    """
    Number of blocks whose label lies in one of the first i copies.

    Raises:
        ContractViolation: If i is outside 1..m
    """
    if not 1 <= i <= state.m:
        raise ContractViolation(f"copy bound must lie in 1..{state.m}, got {i}")
    return sum(len(state.copies[n]) for n in range(i))
