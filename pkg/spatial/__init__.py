"""Spatial delayed coalescent on Z², with and without rebirth."""

from .engine import evolve, evolve_coupled
from .oracle import (two_site_generator, two_site_merge_probability, two_site_table,
                     write_two_site_table)
from .rebirth import RebirthState, Snapshot, evolve_rebirth, label_persistence_holds, n_rebirth
from .state import (
    INSTANT,
    InitialConfig,
    InitialKind,
    SpatialState,
    init_configuration,
    restrict_state,
    thin_state,
)

__all__ = [
    "INSTANT",
    "InitialKind",
    "InitialConfig",
    "SpatialState",
    "init_configuration",
    "thin_state",
    "restrict_state",
    "evolve",
    "evolve_coupled",
    "RebirthState",
    "Snapshot",
    "evolve_rebirth",
    "n_rebirth",
    "label_persistence_holds",
    "two_site_generator",
    "two_site_merge_probability",
    "two_site_table",
    "write_two_site_table",
]
