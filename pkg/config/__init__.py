"""Scenario configuration and validation."""

from .config import Config
from .validator import ScenarioValidator, ValidationLevel, ValidationResult, ValidationRule

__all__ = [
    "Config",
    "ScenarioValidator",
    "ValidationLevel",
    "ValidationResult",
    "ValidationRule",
]
