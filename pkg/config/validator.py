"""
Scenario configuration validation.

Every configuration key has a ValidationRule (type, range, choices or a
custom check); every scenario adds cross-field checks such as alpha < beta.
Failures are reported as ValidationResult entries whose message names the
violated constraint in a single line.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..core.exceptions import ScenarioValidationError
from ..walks.kernel import WalkKernel
from .config import Config


class ValidationLevel(Enum):
    """Validation severity levels."""
    ERROR = "error"
    WARNING = "warning"


@dataclass
class ValidationRule:
    """Constraint on a single configuration key."""
    key: str
    types: Tuple[type, ...] = ()
    minimum: Optional[float] = None
    maximum: Optional[float] = None
    exclusive_minimum: bool = False
    choices: Optional[Sequence[Any]] = None
    validator: Optional[Callable[[Any], bool]] = None
    constraint: str = ""
    level: ValidationLevel = ValidationLevel.ERROR


@dataclass
class ValidationResult:
    """Outcome of one failed check."""
    key: str
    is_valid: bool
    level: ValidationLevel
    message: str
    actual_value: Any = None


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _numbers(value: Any) -> List[float]:
    values = value if isinstance(value, (list, tuple)) else [value]
    if not values or not all(_is_number(v) for v in values):
        raise ValueError("not a number or a list of numbers")
    return [float(v) for v in values]


def _is_grid(value: Any) -> bool:
    try:
        return all(math.isfinite(v) and v > 0 for v in _numbers(value))
    except ValueError:
        return False


def _is_gamma(value: Any) -> bool:
    if isinstance(value, str):
        return value.lower() in ('inf', 'infinity')
    return _is_number(value) and value >= 0


def _is_kernel(value: Any) -> bool:
    if not isinstance(value, list):
        return False
    try:
        WalkKernel.from_json(value)
    except (ValueError, TypeError):
        return False
    return True


def _increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


# Keys understood by ScenarioConfig.from_config.
RULES: List[ValidationRule] = [
    ValidationRule('scenario', types=(str,)),
    ValidationRule('t', types=(int, float), minimum=0, exclusive_minimum=True),
    ValidationRule('alpha', validator=_is_grid, constraint="alpha > 0"),
    ValidationRule('beta', validator=_is_grid, constraint="beta > 0"),
    ValidationRule('u', validator=_is_grid, constraint="u > 0"),
    ValidationRule('rho', types=(int, float), minimum=0, exclusive_minimum=True),
    ValidationRule('p', types=(int, float), minimum=0, maximum=1, exclusive_minimum=True),
    ValidationRule('gamma', validator=_is_gamma, constraint="gamma >= 0 or gamma = inf"),
    ValidationRule('delta', types=(int, float), minimum=0, exclusive_minimum=True),
    ValidationRule('initial', types=(str,), choices=('poisson', 'bernoulli', 'thinned')),
    ValidationRule('replicates', types=(int,), minimum=1),
    ValidationRule('seed', types=(int,), minimum=0),
    ValidationRule('buffer', types=(int, float), minimum=0, exclusive_minimum=True),
    ValidationRule('tail_epsilon', types=(int, float), minimum=0, maximum=1, exclusive_minimum=True),
    ValidationRule('truncation', types=(int,), minimum=0),
    ValidationRule('limit_samples', types=(int,), minimum=0),
    ValidationRule('gate_samples', types=(int,), minimum=1),
    ValidationRule('particles', types=(int,), minimum=1),
    ValidationRule('permutation', types=(list,)),
    ValidationRule('block_cap', types=(int,), minimum=1),
    ValidationRule('kernel', validator=_is_kernel, constraint="kernel is a valid jump kernel"),
]

CrossCheck = Callable[[Config], Optional[str]]


class ScenarioValidator:
    """
    Validates scenario configurations.

    Per-key rules are checked first; cross-field checks run only when every
    key passed, so they can rely on well-typed values.
    """

    def __init__(self):
        self.rules: Dict[str, ValidationRule] = {}
        self.checks: Dict[str, List[CrossCheck]] = {}
        for rule in RULES:
            self.register_rule(rule)
        _register_scenario_checks(self)

    def register_rule(self, rule: ValidationRule) -> None:
        self.rules[rule.key] = rule

    def register_check(self, scenario: str, check: CrossCheck) -> None:
        """Add a cross-field check; `*` applies to every scenario."""
        self.checks.setdefault(scenario, []).append(check)

    def validate(self, config: Config) -> List[ValidationResult]:
        """
        Validate a configuration.

        Returns:
            The failed checks, empty when the configuration is valid
        """
        data = config.all()
        results = []

        for key in sorted(data):
            if key not in self.rules:
                results.append(ValidationResult(key, False, ValidationLevel.ERROR,
                                                f"unknown key '{key}'", data[key]))
                continue
            message = self._validate_value(self.rules[key], data[key])
            if message:
                results.append(ValidationResult(key, False, self.rules[key].level, message, data[key]))

        if 'scenario' not in data:
            results.append(ValidationResult('scenario', False, ValidationLevel.ERROR,
                                            "scenario is given"))
        if results:
            return results

        scenario = str(data['scenario']).replace('-', '_')
        for check in self.checks.get('*', []) + self.checks.get(scenario, []):
            message = check(config)
            if message:
                results.append(ValidationResult(scenario, False, ValidationLevel.ERROR, message))
        return results

    def validate_or_raise(self, config: Config) -> None:
        """
        Raises:
            ScenarioValidationError: Naming the first violated constraint
        """
        errors = [r for r in self.validate(config) if r.level is ValidationLevel.ERROR]
        if errors:
            raise ScenarioValidationError(errors[0].message)

    def _validate_value(self, rule: ValidationRule, value: Any) -> Optional[str]:
        key = rule.key
        if rule.types:
            allowed = rule.types
            if isinstance(value, bool) or not isinstance(value, allowed):
                names = ' or '.join(t.__name__ for t in allowed)
                return f"{key} is of type {names}"

        if _is_number(value):
            if rule.minimum is not None:
                if rule.exclusive_minimum and not value > rule.minimum:
                    return f"{key} > {rule.minimum}"
                if not rule.exclusive_minimum and value < rule.minimum:
                    return f"{key} >= {rule.minimum}"
            if rule.maximum is not None and value > rule.maximum:
                return f"{key} <= {rule.maximum}"

        if rule.choices and value not in rule.choices:
            return f"{key} is one of {', '.join(map(str, rule.choices))}"

        if rule.validator is not None and not rule.validator(value):
            return rule.constraint or f"{key} is valid"
        return None


def _grid_of(config: Config, key: str) -> List[float]:
    value = config.get(key)
    return [] if value is None else _numbers(value)


def _gamma_of(config: Config) -> float:
    gamma = config.get('gamma', 1.0)
    return math.inf if isinstance(gamma, str) else float(gamma)


def _require(*keys: str) -> CrossCheck:
    def check(config: Config) -> Optional[str]:
        for key in keys:
            if config.get(key) is None:
                return f"{key} is given"
        return None
    return check


def _single(*keys: str) -> CrossCheck:
    def check(config: Config) -> Optional[str]:
        for key in keys:
            if len(_grid_of(config, key)) != 1:
                return f"{key} is a single value"
        return None
    return check


def _t_above_one(config: Config) -> Optional[str]:
    return None if float(config.get('t')) > 1 else "t > 1"


def _alpha_in_unit(config: Config) -> Optional[str]:
    return None if all(0 < a <= 1 for a in _grid_of(config, 'alpha')) else "0 < alpha <= 1"


def _beta_grid_above_alpha(config: Config) -> Optional[str]:
    alpha, betas = _grid_of(config, 'alpha')[0], _grid_of(config, 'beta')
    if not betas:
        return "beta is given"
    if not _increasing(betas):
        return "beta grid is strictly increasing"
    if min(betas) <= alpha:
        return "alpha < beta"
    return None


def _alpha_below_beta(config: Config) -> Optional[str]:
    alpha, beta = _grid_of(config, 'alpha')[0], _grid_of(config, 'beta')[0]
    return None if alpha <= beta else "alpha <= beta"


def _initial_parameters(config: Config) -> Optional[str]:
    initial = config.get('initial', 'poisson')
    needed = {'poisson': 'rho', 'bernoulli': 'p', 'thinned': 'delta'}[initial]
    return None if config.get(needed) is not None else f"{needed} is given for initial = {initial}"


def _alpha_grid(config: Config) -> Optional[str]:
    grid = _grid_of(config, 'alpha')
    if len(grid) < 2:
        return "alpha grid has at least two values"
    if not _increasing(grid):
        return "alpha grid is strictly increasing"
    if grid[-1] >= 1:
        return "alpha < 1"
    return None


def _u_vector(config: Config) -> Optional[str]:
    alpha, u = _grid_of(config, 'alpha')[0], _grid_of(config, 'u')
    if not u:
        return "u is given"
    if not (alpha < u[0] and _increasing(u) and u[-1] < 1):
        return "alpha < u_1 < ... < u_m < 1"
    return None


def _finite_gamma(config: Config) -> Optional[str]:
    return None if math.isfinite(_gamma_of(config)) else "gamma < inf"


def _permutation(config: Config) -> Optional[str]:
    k = int(config.get('particles', 0))
    permutation = config.get('permutation') or list(range(k))
    if k < 2:
        return "particles >= 2"
    if sorted(permutation) != list(range(k)):
        return f"permutation is a permutation of 0..{k - 1}"
    return None


def _sparse_particles(config: Config) -> Optional[str]:
    k = int(config.get('particles', 0))
    return None if 1 <= k <= 6 else "1 <= particles <= 6"


def _register_scenario_checks(validator: ScenarioValidator) -> None:
    coalescent = ('erdos_taylor', 'theorem1', 'theorem2', 'theorem3', 'theorem4', 'theorem5',
                  'moment_bound', 'exchangeability', 'sparse_recursion')
    for scenario in coalescent:
        validator.register_check(scenario, _require('t', 'alpha'))
        validator.register_check(scenario, _t_above_one)
        validator.register_check(scenario, _alpha_in_unit)

    validator.register_check('erdos_taylor', _single('alpha', 'beta'))

    for scenario in ('theorem1', 'theorem2', 'theorem3', 'moment_bound'):
        validator.register_check(scenario, _single('alpha'))
        validator.register_check(scenario, _beta_grid_above_alpha)
        validator.register_check(scenario, _initial_parameters)

    validator.register_check('theorem4', _alpha_grid)
    validator.register_check('theorem4', _initial_parameters)

    validator.register_check('theorem5', _single('alpha'))
    validator.register_check('theorem5', _require('rho'))
    validator.register_check('theorem5', _u_vector)
    validator.register_check('theorem5', _finite_gamma)

    validator.register_check('exchangeability', _single('alpha', 'beta'))
    validator.register_check('exchangeability', _permutation)

    validator.register_check('sparse_recursion', _single('alpha', 'beta'))
    validator.register_check('sparse_recursion', _alpha_below_beta)
    validator.register_check('sparse_recursion', _sparse_particles)

    validator.register_check('lookdown_check', _require('t'))
    validator.register_check('lookdown_check', _finite_gamma)

    validator.register_check('poisson_domination', _require('delta'))
