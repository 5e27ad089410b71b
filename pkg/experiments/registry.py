"""
Scenario registry.

Maps scenario names (and their hyphenated command aliases) to driver
classes and builds drivers for validated configurations.
"""

from threading import RLock
from typing import Dict, List, Type

from ..core.exceptions import UnknownScenarioError
from .drivers import (
    AlphaProcessDriver,
    BernoulliCountingDriver,
    CountingDriver,
    ErdosTaylorDriver,
    ExchangeabilityDriver,
    LookdownDriver,
    MomentBoundDriver,
    PoissonDominationDriver,
    RebirthCheckpointDriver,
    ScenarioDriver,
    SparseRecursionDriver,
    ThinnedCountingDriver,
)
from .scenario import ScenarioConfig

DRIVERS: List[Type[ScenarioDriver]] = [
    ErdosTaylorDriver,
    CountingDriver,
    ThinnedCountingDriver,
    BernoulliCountingDriver,
    AlphaProcessDriver,
    RebirthCheckpointDriver,
    MomentBoundDriver,
    ExchangeabilityDriver,
    SparseRecursionDriver,
    LookdownDriver,
    PoissonDominationDriver,
]


class ScenarioRegistry:
    """Registry of scenario drivers."""

    def __init__(self):
        self._bindings: Dict[str, Type[ScenarioDriver]] = {}
        self._aliases: Dict[str, str] = {}
        self._lock = RLock()

    def bind(self, name: str, driver: Type[ScenarioDriver]) -> None:
        """
        Register a driver class under a scenario name.

        Args:
            name: The scenario name
            driver: The driver class
        """
        with self._lock:
            self._bindings[name] = driver

    def alias(self, name: str, alias: str) -> None:
        with self._lock:
            self._aliases[alias] = name

    def bound(self, name: str) -> bool:
        return name in self._bindings or name in self._aliases

    def driver_class(self, name: str) -> Type[ScenarioDriver]:
        """
        Raises:
            UnknownScenarioError: If no driver is registered under name
        """
        with self._lock:
            name = self._aliases.get(name, name)
            if name not in self._bindings:
                raise UnknownScenarioError(f"no driver registered for scenario [{name}]")
            return self._bindings[name]

    def make(self, config: ScenarioConfig) -> ScenarioDriver:
        """Build the driver of a configuration's scenario."""
        return self.driver_class(config.scenario.value)(config)

    def __contains__(self, name: str) -> bool:
        return self.bound(name)

    def __getitem__(self, name: str) -> Type[ScenarioDriver]:
        return self.driver_class(name)


def default_registry() -> ScenarioRegistry:
    """A registry holding every built-in scenario under its name and command."""
    registry = ScenarioRegistry()
    for driver in DRIVERS:
        registry.bind(driver.scenario.value, driver)
        if driver.scenario.command != driver.scenario.value:
            registry.alias(driver.scenario.value, driver.scenario.command)
    return registry
