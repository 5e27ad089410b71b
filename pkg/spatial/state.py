"""
State of the spatial delayed coalescent.

A SpatialState holds the live blocks keyed by label, the per-site registry
and the pair weights that drive coalescence. All mutation goes through
add_block / move_block / merge_blocks so that the incremental event rate stays
consistent with the registry.
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

from ..core.exceptions import CoalsimError, ContractViolation
from ..core.lattice import LatticeBox, Site, Torus, simulation_radius, sup_norm, wrap_site
from ..core.partition import Block, Individual, MarkedPartition
from ..core.random import RandomStream
from ..kingman.coalescent import entrance_count
from ..walks.kernel import WalkKernel
from .fenwick import WeightedKeys

logger = logging.getLogger('coalsim.spatial')

INSTANT = math.inf


def _pairs(k: int) -> int:
    return k * (k - 1) // 2


class InitialKind(Enum):
    POISSON = 'poisson'
    BERNOULLI = 'bernoulli'
    INFINITE_THINNED = 'thinned'


@dataclass(frozen=True)
class InitialConfig:
    """
    Initial law of the blocks on a support box.

    Attributes:
        kind: Poisson, Bernoulli or δ-thinned infinite configuration
        support: Box carrying the initial blocks; Λ^{α,t} when None
        rho: Poisson intensity
        p: Bernoulli success probability
        delta: Thinning time
    """

    kind: InitialKind
    support: Optional[LatticeBox] = None
    rho: Optional[float] = None
    p: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind is InitialKind.POISSON and not (self.rho is not None and 0 < self.rho < math.inf):
            raise ContractViolation(f"Poisson configuration needs 0 < rho < inf, got {self.rho}")
        if self.kind is InitialKind.BERNOULLI and not (self.p is not None and 0 < self.p <= 1):
            raise ContractViolation(f"Bernoulli configuration needs 0 < p <= 1, got {self.p}")
        if self.kind is InitialKind.INFINITE_THINNED and not (self.delta is not None and self.delta > 0):
            raise ContractViolation(f"thinned configuration needs delta > 0, got {self.delta}")

    @classmethod
    def poisson(cls, rho: float, support: Optional[LatticeBox] = None) -> "InitialConfig":
        return cls(InitialKind.POISSON, support, rho=rho)

    @classmethod
    def bernoulli(cls, p: float, support: Optional[LatticeBox] = None) -> "InitialConfig":
        return cls(InitialKind.BERNOULLI, support, p=p)

    @classmethod
    def infinite_thinned(cls, delta: float, support: Optional[LatticeBox] = None) -> "InitialConfig":
        return cls(InitialKind.INFINITE_THINNED, support, delta=delta)


class SpatialState:
    """
    Marked partition of a spatial coalescent together with its dynamics.

    Args:
        gamma: Pair coalescence rate, INSTANT for immediate coalescence
        kernel: Jump kernel of the migrating blocks
        region: Periodic region, None for the unbounded lattice
        clock: Current time
        track_members: Keep explicit member sets on the blocks
        migration_rate: Jump rate of each block; 0 disables migration
        debug: Check merge statistics on every merge
    """

    def __init__(self, blocks: Iterable[Block] = (), gamma: float = 1.0,
                 kernel: Optional[WalkKernel] = None, region: Optional[Torus] = None,
                 clock: float = 0.0, track_members: bool = False,
                 migration_rate: float = 1.0, debug: bool = False):
        if gamma < 0:
            raise ContractViolation(f"coalescence rate must be non-negative, got {gamma}")
        if migration_rate < 0:
            raise ContractViolation(f"migration rate must be non-negative, got {migration_rate}")

        self.gamma = gamma
        self.kernel = kernel or WalkKernel.simple()
        self.region = region
        self.clock = clock
        self.track_members = track_members
        self.migration_rate = migration_rate
        self.debug = debug
        self.events = 0

        self.blocks: Dict[Individual, Block] = {}
        self.site_index: Dict[Site, List[Individual]] = {}
        self.pairs: WeightedKeys = WeightedKeys()
        self._order: List[Individual] = []
        self._position: Dict[Individual, int] = {}

        for block in blocks:
            self.add_block(block)

    @classmethod
    def from_sites(cls, sites: Sequence[Site], **options) -> "SpatialState":
        """One singleton per site, labeled 1..n in the given order."""
        state = cls(**options)
        for index, site in enumerate(sites, start=1):
            state.add_block(Block.singleton(Individual(index, 0.0), site, sup_norm(site),
                                            state.track_members))
        state.settle()
        return state

    @property
    def instant(self) -> bool:
        return math.isinf(self.gamma)

    # registry

    def __len__(self) -> int:
        return len(self.blocks)

    def add_block(self, block: Block) -> None:
        if block.label in self.blocks:
            raise ContractViolation(f"label {block.label} is already live")
        block.site = wrap_site(self.region, block.site)
        self.blocks[block.label] = block
        self._position[block.label] = len(self._order)
        self._order.append(block.label)
        here = self.site_index.setdefault(block.site, [])
        here.append(block.label)
        self.pairs.set(block.site, _pairs(len(here)))

    def remove_block(self, label: Individual) -> Block:
        block = self.blocks.pop(label)
        position = self._position.pop(label)
        last = self._order.pop()
        if last != label:
            self._order[position] = last
            self._position[last] = position

        here = self.site_index[block.site]
        here.remove(label)
        if not here:
            del self.site_index[block.site]
        self.pairs.set(block.site, _pairs(len(here)))
        return block

    def move_block(self, label: Individual, step: Site) -> Site:
        """Move a block by a kernel step and return its new site."""
        block = self.remove_block(label)
        block.site = (block.site[0] + step[0], block.site[1] + step[1])
        self.add_block(block)
        return block.site

    def merge_blocks(self, first: Individual, second: Individual) -> Block:
        """
        Merge two co-located blocks at the current clock.

        Returns:
            The merged block, carrying the smaller label
        """
        a, b = self.blocks[first], self.blocks[second]
        if a.site != b.site:
            raise ContractViolation(f"blocks {first} and {second} are not co-located")
        self.remove_block(first)
        self.remove_block(second)
        merged = a.merged_with(b)
        if self.debug:
            self._check_merge(a, b, merged)
        self.add_block(merged)
        self._after_merge(merged, max(first, second))
        return merged

    def _after_merge(self, merged: Block, loser: Individual) -> None:
        pass

    def _check_merge(self, a: Block, b: Block, merged: Block) -> None:
        if (merged.min_initial_norm != min(a.min_initial_norm, b.min_initial_norm)
                or merged.earliest_birth != min(a.earliest_birth, b.earliest_birth)
                or merged.size != a.size + b.size):
            raise CoalsimError(f"merge statistics of {merged.label} disagree with its parents")
        logger.debug("merge", extra={'label': merged.label, 'site': merged.site, 'clock': self.clock})

    def collapse_site(self, site: Site) -> None:
        """Merge every block at a site into one."""
        while len(self.site_index.get(site, ())) >= 2:
            here = sorted(self.site_index[site])
            self.merge_blocks(here[0], here[1])

    def settle(self) -> None:
        """Apply instantaneous coalescence to the whole state."""
        if self.instant:
            for site in [s for s, labels in self.site_index.items() if len(labels) >= 2]:
                self.collapse_site(site)

    def random_block(self, rng: RandomStream) -> Individual:
        return self._order[rng.below(len(self._order))]

    # rates

    def migration_total(self) -> float:
        return self.migration_rate * len(self.blocks)

    def coalescence_total(self) -> float:
        if self.instant or self.gamma == 0:
            return 0.0
        return self.gamma * self.pairs.total

    def total_rate(self) -> float:
        return self.migration_total() + self.coalescence_total()

    def full_rate(self) -> float:
        """Total event rate recomputed from the site registry."""
        pairs = sum(_pairs(len(labels)) for labels in self.site_index.values())
        coalescence = 0.0 if self.instant or self.gamma == 0 else self.gamma * pairs
        return self.migration_rate * len(self.blocks) + coalescence

    def rate_discrepancy(self) -> float:
        """Relative difference between the incremental and the rebuilt rate."""
        incremental, rebuilt = self.total_rate(), self.full_rate()
        if rebuilt == 0:
            return abs(incremental)
        return abs(incremental - rebuilt) / rebuilt

    # observables

    def block_count(self) -> int:
        return len(self.blocks)

    def restricted_block_count(self, alpha: float, t: float) -> int:
        box = LatticeBox.alpha_box(t, alpha)
        return sum(1 for block in self.blocks.values() if box.contains_norm(block.min_initial_norm))

    def partition(self) -> MarkedPartition:
        return MarkedPartition.of(self.blocks.values(), self.clock)

    def copy(self) -> "SpatialState":
        twin = self.__class__.__new__(self.__class__)
        twin.__dict__.update(self.__dict__)
        twin.blocks = {}
        twin.site_index = {}
        twin.pairs = WeightedKeys()
        twin._order = []
        twin._position = {}
        for label in sorted(self.blocks):
            twin.add_block(self.blocks[label].copy())
        return twin

    def with_blocks(self, blocks: Iterable[Block]) -> "SpatialState":
        """A state with the same dynamics and clock holding the given blocks."""
        return SpatialState(blocks, gamma=self.gamma, kernel=self.kernel, region=self.region,
                            clock=self.clock, track_members=self.track_members,
                            migration_rate=self.migration_rate, debug=self.debug)

    def to_dict(self) -> dict:
        return {
            'clock': self.clock,
            'blocks': [
                {
                    'index': block.label.index,
                    'birth': block.label.birth_time,
                    'x': block.site[0],
                    'y': block.site[1],
                    'size': block.size,
                    'min_initial_norm': block.min_initial_norm,
                }
                for block in (self.blocks[label] for label in sorted(self.blocks))
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def init_configuration(config: InitialConfig, t: float, alpha: float, rng: RandomStream,
                       gamma: float = 1.0, kernel: Optional[WalkKernel] = None,
                       region: Optional[Torus] = None, buffer: float = 3.0,
                       periodic: bool = True, track_members: bool = False,
                       tail_epsilon: float = 1e-6) -> SpatialState:
    """
    Draw an initial state on the support box.

    Args:
        config: Initial law; its support defaults to Λ^{α,t}
        t: Scaling time, t > 1
        alpha: Space exponent in (0, 1]
        rng: Random stream
        gamma: Pair coalescence rate or INSTANT
        kernel: Jump kernel, simple walk by default
        region: Periodic region; derived from t and buffer when None
        buffer: Buffer factor B of the default region Λ(⌈B√t log t⌉)
        periodic: Use the unbounded lattice when False
        track_members: Keep explicit member sets
        tail_epsilon: Truncation error of the per-site entrance law

    Returns:
        A SpatialState; its clock is δ for thinned configurations, 0 otherwise
    """
    if t <= 1:
        raise ContractViolation(f"initial configuration needs t > 1, got {t}")
    if not 0 < alpha <= 1:
        raise ContractViolation(f"initial configuration needs alpha in (0, 1], got {alpha}")

    support = config.support or LatticeBox.alpha_box(t, alpha)
    if periodic and region is None:
        region = Torus.around(max(simulation_radius(t, buffer), support.radius))
    if region is not None and not all(region.contains(site) for site in _corners(support)):
        raise ContractViolation("initial support does not fit into the simulation region")

    clock = config.delta if config.kind is InitialKind.INFINITE_THINNED else 0.0
    state = SpatialState(gamma=gamma, kernel=kernel, region=region, clock=clock,
                         track_members=track_members)

    index = 1
    for site in support.sites():
        if config.kind is InitialKind.POISSON:
            count = rng.poisson(config.rho)
        elif config.kind is InitialKind.BERNOULLI:
            count = 1 if rng.uniform() < config.p else 0
        elif math.isinf(gamma):
            count = 1
        else:
            count = entrance_count(config.delta, gamma, tail_epsilon, rng)

        norm = sup_norm(site)
        for _ in range(count):
            state.add_block(Block.singleton(Individual(index, 0.0), site, norm, track_members))
            index += 1

    state.settle()
    logger.debug("initial configuration drawn",
                 extra={'kind': config.kind.value, 'blocks': len(state), 'sites': support.site_count()})
    return state


def _corners(box: LatticeBox) -> List[Site]:
    r = box.radius
    if r < 0:
        return []
    return [(-r, -r), (-r, r), (r, -r), (r, r)]


def thin_state(state: SpatialState, keep: float, rng: RandomStream) -> SpatialState:
    """Keep each block independently with probability keep; labels are preserved."""
    if not 0 <= keep <= 1:
        raise ContractViolation(f"keep probability must lie in [0, 1], got {keep}")
    kept = [state.blocks[label].copy() for label in sorted(state.blocks) if rng.uniform() < keep]
    return state.with_blocks(kept)


def restrict_state(state: SpatialState, box: LatticeBox) -> SpatialState:
    """Sub-state of the blocks holding an individual initially in the box."""
    kept = [state.blocks[label].copy() for label in sorted(state.blocks)
            if box.contains_norm(state.blocks[label].min_initial_norm)]
    return state.with_blocks(kept)
