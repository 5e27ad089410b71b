"""
Kingman coalescent with rebirth on a time window.

The process starts from `truncation` singletons born at window_start. While
the clock lies in the window every merge also creates a new singleton that
carries the index of the losing label and the merge time as its birth time,
so the block count stays constant. After window_end merges are plain.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence

import numpy as np

from ..core.exceptions import ContractViolation
from ..core.partition import Individual
from ..core.random import RandomStream

logger = logging.getLogger('coalsim.kingman')

WINDOW_SLACK = 1e-12


@dataclass
class KingmanBlock:
    label: Individual
    earliest_birth: float
    size: int = 1
    members: Optional[FrozenSet[Individual]] = None


@dataclass
class KingmanState:
    """
    Non-spatial labeled partition with birth times.

    Attributes:
        blocks: Current blocks
        clock: Current time
        pair_rate: Coalescence rate per pair
        window_start: Start of the rebirth window
        window_end: End of the rebirth window
        rebirths: Number of rebirth merges performed
    """

    blocks: List[KingmanBlock]
    clock: float
    pair_rate: float
    window_start: float
    window_end: float
    rebirths: int = 0
    track_members: bool = field(default=False, repr=False)

    @classmethod
    def initial(cls, truncation: int, window_start: float, window_end: float,
                pair_rate: float = 1.0, track_members: bool = False) -> "KingmanState":
        blocks = []
        for index in range(1, truncation + 1):
            label = Individual(index, window_start)
            members = frozenset([label]) if track_members else None
            blocks.append(KingmanBlock(label, window_start, 1, members))
        return cls(blocks, window_start, pair_rate, window_start, window_end,
                   track_members=track_members)

    def __len__(self) -> int:
        return len(self.blocks)

    def labels(self) -> List[Individual]:
        return sorted(block.label for block in self.blocks)

    def block_for(self, index: int) -> KingmanBlock:
        """The live block whose label carries the given index."""
        for block in self.blocks:
            if block.label.index == index:
                return block
        raise ContractViolation(f"no live block carries index {index}")

    def in_window(self, time: float) -> bool:
        return self.window_start <= time <= self.window_end

    def merge(self, first: int, second: int, time: float) -> None:
        """
        Merge the blocks at positions first and second at the given time.

        Inside the window the losing label's index is reborn as a singleton.
        """
        if first == second:
            raise ContractViolation("cannot merge a block with itself")
        a, b = self.blocks[first], self.blocks[second]
        winner, loser = (a, b) if a.label < b.label else (b, a)

        members = None
        if winner.members is not None and loser.members is not None:
            members = winner.members | loser.members
        merged = KingmanBlock(winner.label, min(winner.earliest_birth, loser.earliest_birth),
                              winner.size + loser.size, members)

        for position in sorted((first, second), reverse=True):
            last = self.blocks.pop()
            if position < len(self.blocks):
                self.blocks[position] = last
        self.blocks.append(merged)

        if self.in_window(time):
            newborn = Individual(loser.label.index, time)
            self.blocks.append(KingmanBlock(
                newborn, time, 1, frozenset([newborn]) if self.track_members else None,
            ))
            self.rebirths += 1
        self.clock = time

    def merge_indices(self, first_index: int, second_index: int, time: float) -> None:
        """Merge the blocks labeled by the two indices; used to replay schedules."""
        positions = {block.label.index: k for k, block in enumerate(self.blocks)}
        try:
            self.merge(positions[first_index], positions[second_index], time)
        except KeyError as e:
            raise ContractViolation(f"no live block carries index {e.args[0]}")

    def set_partition(self) -> FrozenSet[FrozenSet[Individual]]:
        if not self.track_members:
            raise ContractViolation("set partition requested but membership is not tracked")
        return frozenset(block.members for block in self.blocks)


def simulate_rebirth(window_start: float, window_end: float, eval_time: float, truncation: int,
                     pair_rate: float, rng: RandomStream, track_members: bool = False) -> KingmanState:
    """
    Run the windowed rebirth coalescent up to eval_time.

    Args:
        window_start: Time of the initial singletons
        window_end: Last time at which merges cause rebirth
        eval_time: Time at which the state is returned
        truncation: Number of initial singletons
        pair_rate: Coalescence rate per pair
        rng: Random stream
        track_members: Keep explicit member sets

    Returns:
        The KingmanState at eval_time

    Raises:
        ContractViolation: If the times are out of order or truncation < 1
    """
    if not window_start <= window_end <= eval_time:
        raise ContractViolation(
            f"rebirth needs window_start <= window_end <= eval_time, "
            f"got {window_start}, {window_end}, {eval_time}"
        )
    if truncation < 1:
        raise ContractViolation(f"rebirth needs truncation >= 1, got {truncation}")

    state = KingmanState.initial(truncation, window_start, window_end, pair_rate, track_members)
    clock = window_start
    while True:
        k = len(state.blocks)
        if k < 2 or pair_rate <= 0:
            break
        clock += rng.exponential(pair_rate * k * (k - 1) / 2.0)
        if clock > eval_time:
            break
        first, second = rng.pair(k)
        state.merge(first, second, clock)

    state.clock = eval_time
    return state


def n_alpha(state: KingmanState, log_alpha: float) -> int:
    """
    Number of blocks holding an individual born by log_alpha.

    Raises:
        ContractViolation: If log_alpha lies outside the rebirth window
    """
    if not state.window_start - WINDOW_SLACK <= log_alpha <= state.window_end + WINDOW_SLACK:
        raise ContractViolation(
            f"log alpha {log_alpha} lies outside the window "
            f"[{state.window_start}, {state.window_end}]"
        )
    return sum(1 for block in state.blocks if block.earliest_birth <= log_alpha + WINDOW_SLACK)


def simulate_rebirth_discrete(alpha_grid: Sequence[float], truncation: int, pair_rate: float,
                              rng: Optional[RandomStream] = None,
                              state: Optional[KingmanState] = None) -> np.ndarray:
    """
    Block counts of the discrete-rebirth coalescent on an α grid.

    Built by postprocessing one windowed rebirth realisation on
    [log α_1, log α_m] evaluated at 0: every birth time is moved up to the
    next grid point, and Ñ_k counts the blocks with a moved birth time at
    most log α_k. A realisation can be passed in to postprocess it instead of
    simulating a fresh one.
    """
    grid = np.asarray(alpha_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(grid > 1):
        raise ContractViolation("alpha grid must be non-empty and lie in (0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise ContractViolation("alpha grid must be strictly increasing")
    log_grid = np.log(grid)

    if state is None:
        if rng is None:
            raise ContractViolation("a random stream is needed when no state is given")
        state = simulate_rebirth(float(log_grid[0]), float(log_grid[-1]), 0.0, truncation,
                                 pair_rate, rng)

    births = np.array([block.earliest_birth for block in state.blocks])
    positions = np.searchsorted(log_grid, births - WINDOW_SLACK, side='left')
    positions = np.minimum(positions, log_grid.size - 1)
    moved = log_grid[positions]
    return np.array([int(np.sum(moved <= bound)) for bound in log_grid])
