"""
Scenarios whose limits are Kingman coalescents with rebirth.

Restricted counts over an α grid converge jointly to the counts N_α of the
windowed rebirth coalescent; the checkpoint functionals of the spatial
coalescent with rebirth converge to the counts of merging coalescents.
"""

import math
from typing import Any, Dict, List, Sequence

from ...core.exceptions import InfeasibleScenarioError
from ...core.lattice import LatticeBox, Torus, rebirth_radius
from ...core.random import RandomStream
from ...kingman.coalescent import choose_truncation
from ...kingman.merging import n_mer, simulate_merging
from ...kingman.rebirth import n_alpha, simulate_rebirth
from ...spatial.engine import evolve
from ...spatial.rebirth import RebirthState, evolve_rebirth, n_rebirth
from ...spatial.state import InitialConfig, init_configuration
from ..gates import merging_stability, rebirth_stability
from ..scenario import ResultRecord, Scenario
from .base import ScenarioDriver
from .counting import initial_config

# expected jumps of one rebirth replicate beyond which the run is refused
EVENT_BUDGET = 1e8
RUN_EVENT_WARNING = 1e9


class AlphaProcessDriver(ScenarioDriver):
    """
    Restricted counts #C^{α,t}_t over an α grid against N_α.

    Only individuals initially in Λ^{α_m,t} are simulated; restricting them
    to smaller boxes afterwards equals simulating the smaller boxes on the
    same event stream.
    """

    scenario = Scenario.THEOREM4

    def prepare(self) -> None:
        config = self.config
        self.kernel = config.walk_kernel()
        self.log_grid = [math.log(alpha) for alpha in config.alpha_grid]
        self.truncation = config.truncation or choose_truncation(-self.log_grid[-1], 1.0,
                                                                 config.tail_epsilon)
        distance = rebirth_stability(self.log_grid, self.truncation, config.gate_samples,
                                     self.auxiliary_stream())
        self.run_gate('rebirth', distance, self.truncation)

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        grid = config.alpha_grid
        state = init_configuration(initial_config(self), config.t, grid[-1], rng,
                                   gamma=config.gamma, kernel=self.kernel, buffer=config.buffer,
                                   tail_epsilon=config.tail_epsilon)
        evolve(state, config.t, rng)
        counts = [state.restricted_block_count(alpha, config.t) for alpha in grid]

        records = [self.record(index, rng, 'count', count, alpha=alpha, beta=1.0)
                   for alpha, count in zip(grid, counts)]
        records.append(self.record(index, rng, 'count_difference', counts[-1] - counts[0], beta=1.0))

        if self.limit_sample(index):
            limit = simulate_rebirth(self.log_grid[0], self.log_grid[-1], 0.0, self.truncation,
                                     1.0, rng)
            limits = [n_alpha(limit, s) for s in self.log_grid]
            records.extend(self.record(index, rng, 'limit_count', count, alpha=alpha, beta=1.0)
                           for alpha, count in zip(grid, limits))
            records.append(self.record(index, rng, 'limit_difference', limits[-1] - limits[0],
                                       beta=1.0))
        return records

    def pairs(self):
        return [('count', 'limit_count'), ('count_difference', 'limit_difference')]

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        return {'truncation': self.truncation, 'gates': dict(self.gates)}


class RebirthCheckpointDriver(ScenarioDriver):
    """
    N^{α,t,ū,ρ}_u of the spatial coalescent with rebirth against N^mer.

    The Poisson start fills a periodic region sized for the largest
    checkpoint horizon; blocks are never culled, so the population stays
    Poisson and dense and one replicate costs about ρ·|region|·t jumps.
    """

    scenario = Scenario.THEOREM5

    def validate(self) -> None:
        config = self.config
        if not math.isfinite(config.gamma):
            raise InfeasibleScenarioError("gamma < inf")
        events = self.estimated_events()
        if events > EVENT_BUDGET:
            raise InfeasibleScenarioError(
                f"rho * region sites * t <= {EVENT_BUDGET:.0e} jumps per replicate "
                f"(estimated {events:.2e}; lower t, rho or buffer)"
            )
        if events * config.replicates > RUN_EVENT_WARNING:
            self.logger.warning("rebirth run exceeds the desk-scale event budget",
                                extra={'events_per_replicate': events,
                                       'replicates': config.replicates})

    def estimated_events(self) -> float:
        """Expected jump count of one replicate."""
        config = self.config
        side = 2 * rebirth_radius(config.t, config.alpha, config.u_vector[-1], config.buffer) + 1
        return config.rho * side * side * config.t

    def prepare(self) -> None:
        config = self.config
        self.kernel = config.walk_kernel()
        self.radius = rebirth_radius(config.t, config.alpha, config.u_vector[-1], config.buffer)
        self.checkpoints = [config.t ** u for u in config.u_vector]
        self.merge_times = [math.log(u / config.alpha) for u in config.u_vector]
        self.eval_time = math.log(1.0 / config.alpha)

        first_span = (self.merge_times[1] if len(self.merge_times) > 1 else self.eval_time)
        first_span -= self.merge_times[0]
        self.truncation = config.truncation or choose_truncation(first_span, 1.0,
                                                                 config.tail_epsilon)
        distance = merging_stability(self.merge_times, self.eval_time, self.truncation,
                                     config.gate_samples, self.auxiliary_stream())
        self.run_gate('merging', distance, self.truncation)

    def simulate(self, rng: RandomStream, track_members: bool = False) -> RebirthState:
        """One trajectory of the spatial coalescent with rebirth, snapshotted at t^{u_i}."""
        config = self.config
        region = Torus.around(self.radius)
        start = init_configuration(InitialConfig.poisson(config.rho, LatticeBox(self.radius)),
                                   config.t, config.alpha, rng, gamma=config.gamma,
                                   kernel=self.kernel, region=region,
                                   track_members=track_members)
        state = RebirthState.from_state(start, LatticeBox.alpha_box(config.t, config.alpha))
        return evolve_rebirth(state, self.checkpoints, config.t, rng)

    def snapshots(self, index: int) -> str:
        """Checkpoint snapshots of replicate index as JSON, replayed from its seed."""
        rng = RandomStream.for_replicate(self.config.master_seed, index)
        return self.simulate(rng).snapshots_json()

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        config = self.config
        state = self.simulate(rng)
        records = [self.record(index, rng, 'count',
                               n_rebirth(state, config.alpha, config.t, u, config.u_vector),
                               alpha=config.alpha, beta=1.0, u=u)
                   for u in config.u_vector]

        if self.limit_sample(index):
            limit = simulate_merging(self.merge_times, self.eval_time, self.truncation, rng)
            records.extend(self.record(index, rng, 'limit_count', n_mer(limit, i),
                                       alpha=config.alpha, beta=1.0, u=u)
                           for i, u in enumerate(config.u_vector, start=1))
        return records

    def pairs(self):
        return [('count', 'limit_count')]

    def summary_extras(self, records: Sequence[ResultRecord]) -> Dict[str, Any]:
        return {'truncation': self.truncation, 'region_radius': self.radius,
                'events_per_replicate': self.estimated_events(), 'gates': dict(self.gates)}
