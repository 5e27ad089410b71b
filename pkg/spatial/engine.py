"""
Gillespie engine of the spatial coalescent.

One exponential clock with the total rate n·migration + γ·Σ_sites k(k-1)/2
drives the state; the event is a migration of a uniform block or a merge of a
uniform pair at a site chosen with weight k(k-1)/2. Coupled evolution drives
a chain of nested states with the event stream of the largest one.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.exceptions import CoalsimError, ContractViolation
from ..core.lattice import Site
from ..core.partition import Individual
from ..core.random import RandomStream
from .state import SpatialState

logger = logging.getLogger('coalsim.spatial')

# Events between rate rebuild checks in debug mode.
REBUILD_INTERVAL = 10_000
RATE_TOLERANCE = 1e-9

MIGRATE = 'migrate'
MERGE = 'merge'

Event = Tuple[str, Individual, object]


def _next_event(state: SpatialState, until: float, rng: RandomStream) -> Optional[Event]:
    """Advance the clock to the next event before until and pick it, or return None."""
    migration = state.migration_total()
    coalescence = state.coalescence_total()
    total = migration + coalescence
    if total <= 0:
        return None
    dt = rng.exponential(total)
    if state.clock + dt > until:
        return None
    state.clock += dt

    if rng.uniform() * total < migration:
        return MIGRATE, state.random_block(rng), state.kernel.sample(rng)

    site = state.pairs.find((1.0 - rng.uniform()) * state.pairs.total)
    here = state.site_index[site]
    first, second = rng.pair(len(here))
    return MERGE, here[first], here[second]


def _apply(state: SpatialState, event: Event) -> List[Tuple[Individual, Individual]]:
    """Apply an event; return the merges it caused as (first, second) label pairs."""
    kind, label, argument = event
    if kind == MIGRATE:
        site = state.move_block(label, argument)
        if not state.instant:
            return []
        merges = []
        while len(state.site_index.get(site, ())) >= 2:
            here = sorted(state.site_index[site])
            merges.append((here[0], here[1]))
            state.merge_blocks(here[0], here[1])
        return merges
    state.merge_blocks(label, argument)
    return [(label, argument)]


def evolve(state: SpatialState, until: float, rng: RandomStream) -> SpatialState:
    """
    Run the state forward to time until.

    The state is advanced in place and returned.

    Raises:
        ContractViolation: If until lies before the state's clock
    """
    if until < state.clock:
        raise ContractViolation(f"cannot evolve from {state.clock} back to {until}")

    while True:
        event = _next_event(state, until, rng)
        if event is None:
            break
        _apply(state, event)
        state.events += 1
        if state.debug and state.events % REBUILD_INTERVAL == 0:
            _check_rates(state)

    state.clock = until
    return state


def _check_rates(state: SpatialState) -> None:
    discrepancy = state.rate_discrepancy()
    logger.debug("rate rebuild", extra={'events': state.events, 'discrepancy': discrepancy})
    if discrepancy > RATE_TOLERANCE:
        raise CoalsimError(f"incremental event rate drifted by {discrepancy:.3g}")


def _initial_matching(smaller: SpatialState, larger: SpatialState) -> Dict[Individual, Individual]:
    """Map each block of larger to at most one co-located block of smaller."""
    preimage: Dict[Individual, Individual] = {}
    for site, labels in smaller.site_index.items():
        available = sorted(larger.site_index.get(site, ()))
        if len(labels) > len(available):
            raise ContractViolation(f"coupled states are not ordered at site {site}")
        unmatched = sorted(label for label in labels if label not in available)
        free = [label for label in available if label not in labels]
        for label in labels:
            if label in available:
                preimage[label] = label
        for label, partner in zip(unmatched, free):
            preimage[partner] = label
    return preimage


def evolve_coupled(states: Sequence[SpatialState], until: float,
                   rng: RandomStream) -> List[SpatialState]:
    """
    Evolve nested states with a single event stream.

    Every block of a smaller state follows a distinct co-located block of the
    next larger state: it jumps when that block jumps and merges with another
    followed block when the two followed blocks merge. The largest state runs
    its own dynamics, so each state has the correct law and the sitewise
    order between consecutive states holds at all times.

    Args:
        states: States ordered by the sitewise partial order, smallest first
        until: Target time
        rng: Random stream

    Returns:
        The states, advanced in place
    """
    states = list(states)
    if not states:
        return states
    top = states[-1]
    for state in states:
        if state.kernel is not top.kernel and state.kernel.steps != top.kernel.steps:
            raise ContractViolation("coupled states must share the jump kernel")
        if state.gamma != top.gamma or state.region != top.region:
            raise ContractViolation("coupled states must share gamma and region")
        if state.clock != top.clock or state.migration_rate != top.migration_rate:
            raise ContractViolation("coupled states must share clock and migration rate")
    if until < top.clock:
        raise ContractViolation(f"cannot evolve from {top.clock} back to {until}")

    # preimages[k] maps labels of states[k + 1] to labels of states[k]
    preimages = [_initial_matching(states[k], states[k + 1]) for k in range(len(states) - 1)]

    while True:
        event = _next_event(top, until, rng)
        if event is None:
            break
        for state in states[:-1]:
            state.clock = top.clock
        _propagate(states, preimages, len(states) - 1, event)
        top.events += 1

    for state in states:
        state.clock = until
    return states


def _propagate(states: List[SpatialState], preimages: List[Dict[Individual, Individual]],
               level: int, event: Event) -> None:
    kind, label, argument = event
    state = states[level]

    if kind == MIGRATE:
        merges = _apply(state, event)
        if level > 0:
            below = preimages[level - 1].get(label)
            if below is not None:
                _propagate(states, preimages, level - 1, (MIGRATE, below, argument))
        for first, second in merges:
            _propagate_merge(states, preimages, level, first, second)
        return

    _apply(state, event)
    _propagate_merge(states, preimages, level, label, argument)


def _propagate_merge(states: List[SpatialState], preimages: List[Dict[Individual, Individual]],
                     level: int, first: Individual, second: Individual) -> None:
    """Rematch after a merge at level and merge the followers one level down."""
    if level == 0:
        return
    survivor = min(first, second)
    site = states[level].blocks[survivor].site
    matching = preimages[level - 1]
    lower = states[level - 1]
    below_first = _live_follower(lower, matching.pop(first, None), site)
    below_second = _live_follower(lower, matching.pop(second, None), site)

    if below_first is not None and below_second is not None and below_first != below_second:
        lower.merge_blocks(below_first, below_second)
        matching[survivor] = min(below_first, below_second)
        _propagate_merge(states, preimages, level - 1, below_first, below_second)
    elif below_first is not None or below_second is not None:
        matching[survivor] = below_first if below_first is not None else below_second


def _live_follower(lower: SpatialState, label: Optional[Individual],
                   site: Site) -> Optional[Individual]:
    """
    Resolve a follower label that instantaneous coalescence below has
    already merged away to the single block left at the site.
    """
    if label is None or label in lower.blocks:
        return label
    here = lower.site_index.get(site, ())
    return here[0] if len(here) == 1 else None
