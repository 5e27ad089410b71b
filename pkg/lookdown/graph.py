"""
Graphical look-down construction on a finite index set.

Every index carries an independent rate-1 walk and every ordered pair i < j
carries a rate-γ Poisson process of arrow times. An arrow from i to j at
time r is effective when the two walks sit on the same site at r. Ancestral
traces start at an index and move forward through the graph: an effective
arrow from i to j sends a trace sitting on j to i. Both the spatial
coalescent and the coalescent with rebirth are read off from the traces.
"""

import bisect
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from ..core.exceptions import ContractViolation
from ..core.lattice import Site, Torus, sup_norm, wrap_site
from ..core.partition import Block, Individual, MarkedPartition
from ..core.random import RandomStream
from ..walks.kernel import WalkKernel

logger = logging.getLogger('coalsim.lookdown')

Arrow = Tuple[float, int, int]


@dataclass(frozen=True)
class Trajectory:
    """Càdlàg step path: site sites[k] on [jump_times[k-1], jump_times[k])."""

    jump_times: Tuple[float, ...]
    sites: Tuple[Site, ...]

    def position(self, time: float) -> Site:
        return self.sites[bisect.bisect_right(self.jump_times, time)]


@dataclass
class ArrowGraph:
    """
    Walks and arrow times of a look-down construction.

    Attributes:
        indices: Ordered index set
        walks: Per index, its trajectory on [0, horizon]
        arrows: Per pair (i, j) with i < j, sorted arrow times
        horizon: Length of the construction
        gamma: Arrow rate per pair
    """

    indices: Tuple[int, ...]
    walks: Dict[int, Trajectory]
    arrows: Dict[Tuple[int, int], Tuple[float, ...]]
    horizon: float
    gamma: float
    _effective: Optional[List[Arrow]] = field(default=None, repr=False)

    def effective_arrows(self) -> List[Arrow]:
        """All effective arrows as (time, source, target), in time order."""
        if self._effective is None:
            arrows = [
                (r, i, j)
                for (i, j), times in self.arrows.items()
                for r in times
                if self.walks[i].position(r) == self.walks[j].position(r)
            ]
            arrows.sort()
            self._effective = arrows
        return self._effective

    def restricted(self, index_set) -> "ArrowGraph":
        """The graph on a subset of the indices."""
        wanted = set(index_set)
        kept = tuple(i for i in self.indices if i in wanted)
        return ArrowGraph(
            kept,
            {i: self.walks[i] for i in kept},
            {pair: times for pair, times in self.arrows.items() if pair[0] in kept and pair[1] in kept},
            self.horizon,
            self.gamma,
        )


def _trajectory(start: Site, horizon: float, kernel: WalkKernel, region: Optional[Torus],
                rng: RandomStream) -> Trajectory:
    jumps = rng.poisson(horizon) if horizon > 0 else 0
    times = sorted(float(s) for s in rng.generator.uniform(0.0, horizon, size=jumps))
    sites = [start]
    for _ in range(jumps):
        dx, dy = kernel.sample(rng)
        sites.append(wrap_site(region, (sites[-1][0] + dx, sites[-1][1] + dy)))
    return Trajectory(tuple(times), tuple(sites))


def build_graph(indices: Sequence[int], initial_sites: Mapping[int, Site], horizon: float,
                gamma: float, kernel: Optional[WalkKernel], rng: RandomStream,
                region: Optional[Torus] = None) -> ArrowGraph:
    """
    Materialise walks and arrow times on [0, horizon].

    Raises:
        ContractViolation: If horizon or gamma is negative or a start site is missing
    """
    if horizon < 0:
        raise ContractViolation(f"look-down horizon must be non-negative, got {horizon}")
    if gamma < 0:
        raise ContractViolation(f"arrow rate must be non-negative, got {gamma}")
    ordered = tuple(sorted(indices))
    missing = [i for i in ordered if i not in initial_sites]
    if missing:
        raise ContractViolation(f"no initial site for indices {missing}")

    kernel = kernel or WalkKernel.simple()
    walks = {i: _trajectory(wrap_site(region, initial_sites[i]), horizon, kernel, region, rng)
             for i in ordered}

    arrows = {}
    for i, j in itertools.combinations(ordered, 2):
        count = rng.poisson(gamma * horizon) if gamma > 0 and horizon > 0 else 0
        arrows[(i, j)] = tuple(sorted(float(r) for r in rng.generator.uniform(0.0, horizon, size=count)))
    return ArrowGraph(ordered, walks, arrows, horizon, gamma)


def _trace(graph: ArrowGraph, i: int, s: float, t: float) -> int:
    arrows = graph.effective_arrows()
    # arrows at exactly s are not crossed
    start = bisect.bisect_right(arrows, (s, float('inf'), float('inf')))
    current = i
    for r, source, target in arrows[start:]:
        if r > t:
            break
        if target == current:
            current = source
    return current


def ancestor(graph: ArrowGraph, i: int, s: float, t: float) -> int:
    """
    Index on which the trace started at i at time s sits at time t.

    Raises:
        ContractViolation: Unless s <= t <= horizon
    """
    if not s <= t <= graph.horizon:
        raise ContractViolation(f"ancestor needs s <= t <= horizon, got {s}, {t}, {graph.horizon}")
    if i not in graph.walks:
        raise ContractViolation(f"index {i} is not part of the graph")
    return _trace(graph, i, s, t)


def descendants(graph: ArrowGraph, j: int, s: float, t: float) -> Set[int]:
    """Indices whose trace from s sits on j at t."""
    return {i for i in graph.indices if ancestor(graph, i, s, t) == j}


def coalescent_from_lookdown(graph: ArrowGraph, t: float) -> MarkedPartition:
    """
    Spatial coalescent at time t: indices grouped by their ancestor, marked
    with the ancestor's position.
    """
    if not 0 <= t <= graph.horizon:
        raise ContractViolation(f"partition time must lie in [0, {graph.horizon}], got {t}")
    groups: Dict[int, List[int]] = defaultdict(list)
    for i in graph.indices:
        groups[ancestor(graph, i, 0.0, t)].append(i)

    blocks = []
    for j, members in groups.items():
        individuals = frozenset(Individual(i, 0.0) for i in members)
        blocks.append(Block(
            label=min(individuals),
            size=len(members),
            min_initial_norm=min(sup_norm(graph.walks[i].position(0.0)) for i in members),
            site=graph.walks[j].position(t),
            earliest_birth=0.0,
            members=individuals,
        ))
    return MarkedPartition.of(blocks, t)


def rebirth_from_lookdown(graph: ArrowGraph, t: float) -> MarkedPartition:
    """
    Coalescent with rebirth at time t.

    Index i yields an individual (i, 0) and one individual (i, r) for every
    effective arrow time r <= t onto i. An individual (i, b) is traced from
    index i just after b; individuals are grouped by where their traces sit
    at t.
    """
    if not 0 <= t <= graph.horizon:
        raise ContractViolation(f"partition time must lie in [0, {graph.horizon}], got {t}")

    births: Dict[int, List[float]] = {i: [0.0] for i in graph.indices}
    for r, _, target in graph.effective_arrows():
        if r <= t:
            births[target].append(r)

    groups: Dict[int, List[Individual]] = defaultdict(list)
    for i, times in births.items():
        for b in times:
            groups[_trace(graph, i, b, t)].append(Individual(i, b))

    blocks = []
    for j, members in groups.items():
        norms = [sup_norm(graph.walks[m.index].position(m.birth_time)) for m in members]
        blocks.append(Block(
            label=min(members),
            size=len(members),
            min_initial_norm=min(norms),
            site=graph.walks[j].position(t),
            earliest_birth=min(m.birth_time for m in members),
            members=frozenset(members),
        ))
    return MarkedPartition.of(blocks, t)


def size_signature(partition: MarkedPartition) -> Tuple[int, ...]:
    """Block sizes ordered by label index."""
    return tuple(block.size for block in sorted(partition.blocks, key=lambda block: block.label))
