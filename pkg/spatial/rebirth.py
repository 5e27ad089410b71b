"""
Spatial coalescent with rebirth.

Every merge also creates a singleton at the merge site carrying the index of
the losing label and the merge time as birth time, so the number of blocks
never changes. Snapshots taken at checkpoint times record where each label
sits; the rebirth functionals are read off from them at the end.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.exceptions import CoalsimError, ContractViolation
from ..core.lattice import LatticeBox, Site, sup_norm
from ..core.partition import Block, Individual
from ..core.random import RandomStream
from .engine import evolve
from .state import SpatialState

logger = logging.getLogger('coalsim.spatial')

CHECKPOINT_SLACK = 1e-9


@dataclass
class Snapshot:
    """
    Label locations at one checkpoint.

    Attributes:
        time: Checkpoint time
        entries: Label -> (site, inside the observation box)
        owners: Individual -> label of its block, recorded when members are tracked
    """

    time: float
    entries: Dict[Individual, Tuple[Site, bool]]
    owners: Optional[Dict[Individual, Individual]] = None

    def to_dict(self) -> dict:
        return {
            'checkpoint': self.time,
            'entries': [
                {'index': label.index, 'birth': label.birth_time,
                 'x': site[0], 'y': site[1], 'in_box': in_box}
                for label, (site, in_box) in sorted(self.entries.items())
            ],
        }


class RebirthState(SpatialState):
    """
    SpatialState whose merges give birth to a new singleton.

    Args:
        observation_box: Box Λ^{α,t} used for the in-box flags of snapshots
        **options: Passed on to SpatialState
    """

    def __init__(self, blocks=(), observation_box: Optional[LatticeBox] = None, **options):
        self.observation_box = observation_box
        self.snapshots: List[Snapshot] = []
        self.rebirths = 0
        super().__init__(blocks, **options)
        if self.instant:
            raise ContractViolation("rebirth needs a finite coalescence rate")

    @classmethod
    def from_state(cls, state: SpatialState,
                   observation_box: Optional[LatticeBox] = None) -> "RebirthState":
        blocks = [state.blocks[label].copy() for label in sorted(state.blocks)]
        return cls(blocks, observation_box=observation_box, gamma=state.gamma,
                   kernel=state.kernel, region=state.region, clock=state.clock,
                   track_members=state.track_members, migration_rate=state.migration_rate,
                   debug=state.debug)

    def _after_merge(self, merged: Block, loser: Individual) -> None:
        before = len(self.blocks)
        newborn = Individual(loser.index, self.clock)
        self.add_block(Block.singleton(newborn, merged.site, sup_norm(merged.site),
                                       self.track_members))
        self.rebirths += 1
        if self.debug and len(self.blocks) != before + 1:
            raise CoalsimError("rebirth did not conserve the block count")

    def snapshot(self) -> Snapshot:
        box = self.observation_box
        entries = {
            label: (block.site, box.contains(block.site) if box is not None else True)
            for label, block in self.blocks.items()
        }
        owners = None
        if self.track_members:
            owners = {member: label for label, block in self.blocks.items()
                      for member in block.members}
        return Snapshot(self.clock, entries, owners)

    def copy(self) -> "RebirthState":
        twin = super().copy()
        twin.snapshots = list(self.snapshots)
        return twin

    def snapshots_json(self) -> str:
        return json.dumps([snapshot.to_dict() for snapshot in self.snapshots], sort_keys=True)


def evolve_rebirth(state: RebirthState, checkpoints: Sequence[float], until: float,
                   rng: RandomStream) -> RebirthState:
    """
    Run the rebirth dynamics to until, snapshotting at every checkpoint.

    Raises:
        ContractViolation: If checkpoints are not increasing, lie before the
            clock or after until
    """
    checkpoints = [float(c) for c in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ContractViolation("checkpoints must be strictly increasing")
    if checkpoints and (checkpoints[0] < state.clock or checkpoints[-1] > until):
        raise ContractViolation(
            f"checkpoints must lie in [{state.clock}, {until}], got {checkpoints[0]}..{checkpoints[-1]}"
        )

    for checkpoint in checkpoints:
        evolve(state, checkpoint, rng)
        state.snapshots.append(state.snapshot())
    evolve(state, until, rng)
    logger.debug("rebirth run finished",
                 extra={'rebirths': state.rebirths, 'blocks': len(state), 'clock': state.clock})
    return state


def n_rebirth(state: RebirthState, alpha: float, t: float, u: float, u_vector: Sequence[float]) -> int:
    """
    Count final blocks whose label was alive and inside Λ^{α,t} at a
    checkpoint t^{u_i} with u_i <= u.

    Raises:
        ContractViolation: If u lies outside [u_1, 1] or a checkpoint
            snapshot is missing
    """
    if not u_vector:
        raise ContractViolation("u vector must not be empty")
    if not u_vector[0] <= u <= 1:
        raise ContractViolation(f"u must lie in [{u_vector[0]}, 1], got {u}")

    box = LatticeBox.alpha_box(t, alpha)
    qualifying = []
    for u_i in u_vector:
        if u_i > u:
            continue
        time = t ** u_i
        snapshot = _snapshot_at(state, time)
        qualifying.append((time, snapshot))

    count = 0
    for label in state.blocks:
        for time, snapshot in qualifying:
            if label.birth_time > time + CHECKPOINT_SLACK:
                continue
            entry = snapshot.entries.get(label)
            if entry is not None and box.contains(entry[0]):
                count += 1
                break
    return count


def _snapshot_at(state: RebirthState, time: float) -> Snapshot:
    for snapshot in state.snapshots:
        if math.isclose(snapshot.time, time, rel_tol=CHECKPOINT_SLACK, abs_tol=CHECKPOINT_SLACK):
            return snapshot
    raise ContractViolation(f"no snapshot was recorded at time {time}")


def label_persistence_holds(state: RebirthState) -> bool:
    """
    Check on a tracked run that every final label born by a checkpoint was
    alive there and owned its own individual.
    """
    if not state.track_members:
        raise ContractViolation("label persistence needs tracked membership")
    for snapshot in state.snapshots:
        for label in state.blocks:
            if label.birth_time > snapshot.time:
                continue
            if label not in snapshot.entries:
                return False
            if snapshot.owners.get(label) != label:
                return False
    return True
