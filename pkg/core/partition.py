"""
Marked partitions, labels and restriction operators.

An Individual is an (index, birth_time) pair; individuals are totally ordered
lexicographically, and the label of a block is its smallest individual. Blocks
carry their mark (a lattice site) together with the mergeable statistics the
scaling functionals need, so that simulators never have to keep member lists
unless explicitly asked to.
"""

from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .exceptions import ContractViolation
from .lattice import LatticeBox, Site


class Individual(NamedTuple):
    """
    A particle line: index and birth time.

    Tuple comparison gives the order (i, s) < (j, t) iff i < j, or i = j and
    s < t.
    """

    index: int
    birth_time: float = 0.0


@dataclass
class Block:
    """
    One partition element with its mark.

    Attributes:
        label: The smallest individual of the block
        size: Number of member individuals
        min_initial_norm: Smallest ∞-norm of a member's initial site
        site: Current lattice site
        earliest_birth: Smallest birth time over members
        members: Explicit member set, kept only when membership is tracked
    """

    label: Individual
    size: int
    min_initial_norm: int
    site: Site
    earliest_birth: float = 0.0
    members: Optional[FrozenSet[Individual]] = None

    @classmethod
    def singleton(cls, individual: Individual, site: Site, norm: int,
                  track_members: bool = False) -> "Block":
        members = frozenset([individual]) if track_members else None
        return cls(individual, 1, norm, site, individual.birth_time, members)

    def merged_with(self, other: "Block") -> "Block":
        """Merge two co-located blocks; the smaller label survives."""
        members = None
        if self.members is not None and other.members is not None:
            members = self.members | other.members
        return Block(
            label=min(self.label, other.label),
            size=self.size + other.size,
            min_initial_norm=min(self.min_initial_norm, other.min_initial_norm),
            site=self.site,
            earliest_birth=min(self.earliest_birth, other.earliest_birth),
            members=members,
        )

    def copy(self) -> "Block":
        return replace(self)


@dataclass(frozen=True)
class MarkedPartition:
    """An immutable snapshot of a marked partition at a clock reading."""

    blocks: Tuple[Block, ...]
    clock: float = 0.0

    def __post_init__(self):
        labels = [block.label for block in self.blocks]
        if len(set(labels)) != len(labels):
            raise ContractViolation("marked partition has two blocks sharing a label")

    @classmethod
    def of(cls, blocks: Iterable[Block], clock: float = 0.0) -> "MarkedPartition":
        ordered = sorted((block.copy() for block in blocks), key=lambda block: block.label)
        return cls(tuple(ordered), clock)

    def __len__(self) -> int:
        return len(self.blocks)

    def labels(self) -> List[Individual]:
        return [block.label for block in self.blocks]

    def total_size(self) -> int:
        return sum(block.size for block in self.blocks)

    def site_counts(self) -> Counter:
        """Number of blocks per occupied site."""
        return Counter(block.site for block in self.blocks)

    def set_partition(self) -> FrozenSet[FrozenSet[Individual]]:
        """The underlying set partition; requires tracked membership."""
        if any(block.members is None for block in self.blocks):
            raise ContractViolation("set partition requested but membership is not tracked")
        return frozenset(block.members for block in self.blocks)


def restrict_by_region(partition: MarkedPartition, box: LatticeBox) -> MarkedPartition:
    """
    Keep the blocks holding an individual initially located in the box.

    There is no separate α threshold: the restriction to Λ^{α,t} is the
    restriction to LatticeBox.alpha_box(t, α), whose integer radius already
    absorbs the rounding of t^{α/2}.

    Args:
        partition: The partition to restrict
        box: The box; its integer radius is compared with min_initial_norm

    Returns:
        The sub-partition, the input is left unchanged
    """
    kept = [block for block in partition.blocks if box.contains_norm(block.min_initial_norm)]
    return MarkedPartition(tuple(block.copy() for block in kept), partition.clock)


IndexPartition = FrozenSet[FrozenSet[Individual]]


def restrict_by_index(partition: Iterable[Iterable[Individual]],
                      index_set: Iterable[int]) -> IndexPartition:
    """Intersect every block with the individuals whose index lies in index_set."""
    indices = frozenset(index_set)
    restricted = set()
    for block in partition:
        kept = frozenset(individual for individual in block if individual.index in indices)
        if kept:
            restricted.add(kept)
    return frozenset(restricted)


def partial_order_leq(first: MarkedPartition, second: MarkedPartition) -> bool:
    """True iff every site holds at most as many blocks in first as in second."""
    second_counts = second.site_counts()
    return all(count <= second_counts.get(site, 0)
               for site, count in first.site_counts().items())


def partition_code(blocks: Iterable[Iterable[Individual]], universe: Sequence[Individual]) -> int:
    """
    Encode a set partition of universe as an integer.

    The code is the restricted growth string of the partition, read in the
    order of universe, as a base-len(universe) number. Equal partitions get
    equal codes regardless of block order.
    """
    owner: Dict[Individual, int] = {}
    for position, block in enumerate(blocks):
        for individual in block:
            owner[individual] = position
    base = max(len(universe), 2)
    renumber: Dict[int, int] = {}
    code = 0
    for individual in universe:
        if individual not in owner:
            raise ContractViolation(f"individual {individual} is not covered by the partition")
        group = renumber.setdefault(owner[individual], len(renumber))
        code = code * base + group
    return code
