"""
coalsim - spatial delayed coalescents on Z² and their Kingman limits

This package simulates the spatial delayed coalescent and the coalescent
with rebirth on the planar lattice, their look-down construction, and the
Kingman-type limit objects, together with a Monte Carlo harness that
checks the scaling limits at desk scale.
"""

from coalsim.core.random import RandomStream
from coalsim.experiments.runner import execute, run_scenario
from coalsim.experiments.scenario import ResultRecord, Scenario, ScenarioConfig
from coalsim.kingman.oracle import marginal_distribution
from coalsim.spatial.engine import evolve
from coalsim.spatial.state import InitialConfig, SpatialState, init_configuration

__version__ = "0.1.0"

__all__ = [
    "RandomStream",
    "Scenario",
    "ScenarioConfig",
    "ResultRecord",
    "execute",
    "run_scenario",
    "marginal_distribution",
    "InitialConfig",
    "SpatialState",
    "init_configuration",
    "evolve",
]
