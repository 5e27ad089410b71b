"""Scenario drivers, one per scenario."""

from .base import ScenarioDriver
from .counting import BernoulliCountingDriver, CountingDriver, MomentBoundDriver, ThinnedCountingDriver
from .domination import PoissonDominationDriver
from .erdos_taylor import ErdosTaylorDriver
from .lookdown import LookdownDriver
from .rebirth import AlphaProcessDriver, RebirthCheckpointDriver
from .sparse import ExchangeabilityDriver, SparseRecursionDriver

__all__ = [
    "ScenarioDriver",
    "ErdosTaylorDriver",
    "CountingDriver",
    "ThinnedCountingDriver",
    "BernoulliCountingDriver",
    "MomentBoundDriver",
    "AlphaProcessDriver",
    "RebirthCheckpointDriver",
    "ExchangeabilityDriver",
    "SparseRecursionDriver",
    "LookdownDriver",
    "PoissonDominationDriver",
]
