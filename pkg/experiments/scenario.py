"""
Scenario descriptions and result records.

A ScenarioConfig is the validated, typed view of a scenario configuration;
every replicate of a run emits ResultRecord rows, one per statistic.
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from ..config.config import Config
from ..core.exceptions import ScenarioValidationError
from ..walks.kernel import WalkKernel


class Scenario(Enum):
    ERDOS_TAYLOR = 'erdos_taylor'
    THEOREM1 = 'theorem1'
    THEOREM2 = 'theorem2'
    THEOREM3 = 'theorem3'
    THEOREM4 = 'theorem4'
    THEOREM5 = 'theorem5'
    MOMENT_BOUND = 'moment_bound'
    EXCHANGEABILITY = 'exchangeability'
    SPARSE_RECURSION = 'sparse_recursion'
    LOOKDOWN_CHECK = 'lookdown_check'
    POISSON_DOMINATION = 'poisson_domination'

    @property
    def command(self) -> str:
        """Name of the CLI subcommand."""
        return self.value.replace('_', '-')

    @classmethod
    def parse(cls, name: str) -> "Scenario":
        try:
            return cls(str(name).replace('-', '_'))
        except ValueError:
            raise ScenarioValidationError(f"scenario is one of {', '.join(s.value for s in cls)}")


# Acceptance-scale parameter sets; files and flags override them.
DEFAULTS: Dict[Scenario, Dict[str, Any]] = {
    Scenario.ERDOS_TAYLOR: {'t': 1e6, 'alpha': 0.5, 'beta': 1.0, 'replicates': 1000},
    Scenario.THEOREM1: {'t': 1e4, 'alpha': 0.3, 'beta': [0.6, 0.8, 1.0], 'rho': 1.0,
                        'initial': 'poisson', 'replicates': 2000},
    Scenario.THEOREM2: {'t': 1e4, 'alpha': 0.3, 'beta': [0.35, 0.6, 0.8, 1.0], 'delta': 0.5,
                        'initial': 'thinned', 'replicates': 2000},
    Scenario.THEOREM3: {'t': 1e4, 'alpha': 0.3, 'beta': [0.35, 0.6, 0.8, 1.0], 'p': 1.0,
                        'initial': 'bernoulli', 'replicates': 2000},
    Scenario.THEOREM4: {'t': 1e4, 'alpha': [0.4, 0.7], 'p': 1.0, 'initial': 'bernoulli',
                        'replicates': 2000},
    Scenario.THEOREM5: {'t': 1e4, 'alpha': 0.3, 'u': [0.5, 0.8], 'rho': 1.0, 'buffer': 1.0,
                        'replicates': 1000},
    Scenario.MOMENT_BOUND: {'t': 1e4, 'alpha': 0.4, 'beta': [0.45, 0.5, 0.55, 0.6], 'rho': 1.0,
                            'initial': 'poisson', 'block_cap': 10, 'replicates': 500},
    Scenario.EXCHANGEABILITY: {'t': 1e4, 'alpha': 0.3, 'beta': 1.0, 'particles': 3,
                               'permutation': [1, 2, 0], 'replicates': 2000},
    Scenario.SPARSE_RECURSION: {'t': 1e4, 'alpha': 0.5, 'beta': 1.0, 'particles': 4,
                                'replicates': 1000},
    Scenario.LOOKDOWN_CHECK: {'t': 1.0, 'replicates': 100000},
    Scenario.POISSON_DOMINATION: {'delta': 0.5, 'replicates': 100000},
}

COMMON_DEFAULTS: Dict[str, Any] = {
    'gamma': 1.0,
    'seed': 0,
    'buffer': 3.0,
    'tail_epsilon': 1e-6,
    'truncation': 0,
    'limit_samples': 0,
    'gate_samples': 20000,
}


def _grid(value: Any) -> Tuple[float, ...]:
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return (float(value),)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Typed scenario description.

    Attributes:
        scenario: Scenario to run
        t: Scaling time
        alpha_grid: Space exponents α (a single value for most scenarios)
        beta_grid: Time exponents β of the observation times t^β
        rho: Poisson intensity
        p: Bernoulli success probability
        gamma: Pair coalescence rate, inf for instantaneous coalescence
        delta: Thinning time, or the duration of the Poisson domination check
        u_vector: Checkpoint exponents of the rebirth scenario
        initial: Initial law: poisson, bernoulli or thinned
        replicates: Number of replicates
        master_seed: Master seed of the run
        buffer: Buffer factor B of the simulation region
        tail_epsilon: Truncation error of entrance-law samples
        truncation: Explicit truncation of limit objects, 0 to derive it
        limit_samples: Limit-side samples, 0 for one per replicate
        gate_samples: Samples per side of a truncation-stability gate
        particles: Particle count of the few-particle scenarios
        permutation: Permutation of starting sites for exchangeability
        block_cap: Block cap N of the moment-bound tightness checks
        kernel: Jump kernel as (dx, dy, p) rows, empty for the simple walk
    """

    scenario: Scenario
    t: float = 1e4
    alpha_grid: Tuple[float, ...] = ()
    beta_grid: Tuple[float, ...] = ()
    rho: Optional[float] = None
    p: Optional[float] = None
    gamma: float = 1.0
    delta: Optional[float] = None
    u_vector: Tuple[float, ...] = ()
    initial: Optional[str] = None
    replicates: int = 100
    master_seed: int = 0
    buffer: float = 3.0
    tail_epsilon: float = 1e-6
    truncation: int = 0
    limit_samples: int = 0
    gate_samples: int = 20000
    particles: int = 0
    permutation: Tuple[int, ...] = field(default=())
    block_cap: int = 10
    kernel: Tuple[Tuple[int, int, float], ...] = ()

    @property
    def alpha(self) -> Optional[float]:
        return self.alpha_grid[0] if self.alpha_grid else None

    @property
    def beta(self) -> Optional[float]:
        return self.beta_grid[0] if self.beta_grid else None

    @classmethod
    def defaults(cls, scenario: Scenario) -> Dict[str, Any]:
        """Built-in parameters of a scenario as plain configuration data."""
        data = dict(COMMON_DEFAULTS)
        data.update(DEFAULTS[scenario])
        data['scenario'] = scenario.value
        return data

    @classmethod
    def from_config(cls, config: Config) -> "ScenarioConfig":
        """Build from a validated configuration."""
        scenario = Scenario.parse(config.get('scenario'))
        gamma = config.get('gamma', 1.0)
        return cls(
            scenario=scenario,
            t=float(config.get('t', 1e4)),
            alpha_grid=_grid(config.get('alpha')),
            beta_grid=_grid(config.get('beta')),
            rho=_optional_float(config.get('rho')),
            p=_optional_float(config.get('p')),
            gamma=math.inf if isinstance(gamma, str) else float(gamma),
            delta=_optional_float(config.get('delta')),
            u_vector=_grid(config.get('u')),
            initial=config.get('initial'),
            replicates=int(config.get('replicates', 100)),
            master_seed=int(config.get('seed', 0)),
            buffer=float(config.get('buffer', 3.0)),
            tail_epsilon=float(config.get('tail_epsilon', 1e-6)),
            truncation=int(config.get('truncation', 0)),
            limit_samples=int(config.get('limit_samples', 0)),
            gate_samples=int(config.get('gate_samples', 20000)),
            particles=int(config.get('particles', 0)),
            permutation=tuple(int(k) for k in config.get('permutation', ()) or ()),
            block_cap=int(config.get('block_cap', 10)),
            kernel=tuple((int(s['dx']), int(s['dy']), float(s['p'])) for s in config.get('kernel') or ()),
        )

    def walk_kernel(self) -> WalkKernel:
        if not self.kernel:
            return WalkKernel.simple()
        return WalkKernel([((dx, dy), p) for dx, dy, p in self.kernel])

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['scenario'] = self.scenario.value
        data['gamma'] = 'inf' if math.isinf(self.gamma) else self.gamma
        return data


RECORD_FIELDS = ('scenario', 't', 'alpha', 'beta', 'rho', 'gamma', 'delta', 'u',
                 'replicate', 'statistic', 'value', 'seed')


def _sortable(value: Optional[float]) -> float:
    return -math.inf if value is None else value


@dataclass(frozen=True)
class ResultRecord:
    """One observation of one statistic in one replicate."""

    scenario: str
    t: Optional[float]
    alpha: Optional[float]
    beta: Optional[float]
    rho: Optional[float]
    gamma: Optional[float]
    delta: Optional[float]
    u: Optional[float]
    replicate: int
    statistic: str
    value: float
    seed: int

    def sort_key(self):
        return (
            self.scenario,
            _sortable(self.t), _sortable(self.alpha), _sortable(self.beta), _sortable(self.rho),
            _sortable(self.gamma), _sortable(self.delta), _sortable(self.u),
            self.replicate, self.statistic,
        )

    def parameters(self) -> Tuple[Optional[float], ...]:
        return self.alpha, self.beta, self.u

    def row(self) -> Tuple[Any, ...]:
        return tuple(getattr(self, name) for name in RECORD_FIELDS)
