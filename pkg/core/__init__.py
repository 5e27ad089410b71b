"""Core coalsim components: lattice, individuals and partitions, random streams."""

from .exceptions import (
    CoalsimError,
    ContractViolation,
    DominationSearchError,
    InfeasibleScenarioError,
    OracleScaleError,
    ScenarioValidationError,
    UnknownScenarioError,
)
from .lattice import LatticeBox, Site, Torus, rebirth_radius, simulation_radius, sup_norm
from .partition import (
    Block,
    Individual,
    MarkedPartition,
    partial_order_leq,
    restrict_by_index,
    restrict_by_region,
)
from .random import RandomStream, mix64

__all__ = [
    "CoalsimError",
    "ContractViolation",
    "OracleScaleError",
    "DominationSearchError",
    "ScenarioValidationError",
    "InfeasibleScenarioError",
    "UnknownScenarioError",
    "Site",
    "LatticeBox",
    "Torus",
    "sup_norm",
    "simulation_radius",
    "rebirth_radius",
    "Individual",
    "Block",
    "MarkedPartition",
    "restrict_by_region",
    "restrict_by_index",
    "partial_order_leq",
    "RandomStream",
    "mix64",
]
