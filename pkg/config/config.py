"""
Scenario configuration with dot notation access.

Scenario parameters come from built-in defaults, an optional JSON scenario
file and command-line overrides, merged in that order. Nothing is read from
the environment.
"""

import copy
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from ..core.exceptions import ScenarioValidationError

_MISSING = object()


class Config:
    """
    Layered scenario parameters.

    Keys such as "kernel.steps" address nested mappings. Resolved lookups
    are memoised and dropped on every write, so a merge of file data or
    flag overrides is always visible to the next read.
    """

    def __init__(self, parameters: Optional[Dict[str, Any]] = None):
        """
        Args:
            parameters: Initial parameter mapping, typically scenario defaults
        """
        self._parameters: Dict[str, Any] = parameters or {}
        self._resolved: Dict[str, Any] = {}

    def _lookup(self, key: str) -> Any:
        node: Any = self._parameters
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return _MISSING
            node = node[part]
        return node

    def _parent(self, key: str, create: bool) -> Tuple[Optional[Dict[str, Any]], str]:
        *path, leaf = key.split('.')
        node = self._parameters
        for part in path:
            child = node.get(part)
            if not isinstance(child, dict):
                if not create:
                    return None, leaf
                child = node[part] = {}
            node = child
        return node, leaf

    def get(self, key: str, default: Any = None) -> Any:
        """
        Look up a parameter.

        Args:
            key: Dotted parameter name
            default: Returned when the parameter is absent

        Returns:
            The parameter value or default
        """
        if key not in self._resolved:
            value = self._lookup(key)
            if value is _MISSING:
                return default
            self._resolved[key] = value
        return self._resolved[key]

    def set(self, key: str, value: Any) -> None:
        """Assign a parameter, creating intermediate mappings as needed."""
        node, leaf = self._parent(key, create=True)
        node[leaf] = value
        self._resolved.clear()

    def has(self, key: str) -> bool:
        return self._lookup(key) is not _MISSING

    def forget(self, key: str) -> None:
        """Drop a parameter; absent keys are ignored."""
        node, leaf = self._parent(key, create=False)
        if node is not None and leaf in node:
            del node[leaf]
            self._resolved.clear()

    def all(self) -> Dict[str, Any]:
        """Deep copy of every parameter."""
        return copy.deepcopy(self._parameters)

    def merge(self, layer: Dict[str, Any]) -> None:
        """
        Lay a mapping over the current parameters.

        Nested mappings merge key by key; any other value replaces what was
        there.

        Args:
            layer: Parameters from a scenario file or from flags
        """
        _overlay(self._parameters, layer)
        self._resolved.clear()

    def load_from_file(self, file_path: Union[str, Path]) -> None:
        """
        Merge a JSON scenario file into the configuration.

        Args:
            file_path: Path to the scenario file

        Raises:
            ScenarioValidationError: If the file is missing, is not valid JSON
                or does not hold a JSON object
        """
        path = Path(file_path)
        if not path.exists():
            raise ScenarioValidationError(f"config file exists ({path})")

        try:
            layer = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ScenarioValidationError(f"config file is valid JSON ({e.msg} at line {e.lineno})")

        if not isinstance(layer, dict):
            raise ScenarioValidationError("config file holds a JSON object")
        self.merge(layer)

    def __getitem__(self, key: str) -> Any:
        return self.get(key)

    def __setitem__(self, key: str, value: Any) -> None:
        self.set(key, value)

    def __contains__(self, key: str) -> bool:
        return self.has(key)

    def __delitem__(self, key: str) -> None:
        self.forget(key)


def _overlay(target: Dict[str, Any], layer: Dict[str, Any]) -> None:
    for key, value in layer.items():
        current = target.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            _overlay(current, value)
        else:
            target[key] = value
