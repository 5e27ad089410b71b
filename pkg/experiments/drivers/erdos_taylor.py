"""Two walks started t^{α/2} apart: do they meet by time t^β?"""

from typing import Dict, List

from ...core.random import RandomStream
from ...walks.walk import erdos_taylor_limit, first_meeting_time
from ..scenario import ResultRecord, Scenario
from .base import ScenarioDriver, StatisticKey


class ErdosTaylorDriver(ScenarioDriver):
    """Records the indicator that the two walks have not met by t^β."""

    scenario = Scenario.ERDOS_TAYLOR

    def prepare(self) -> None:
        config = self.config
        self.kernel = config.walk_kernel()
        self.distance = max(1, int(round(config.t ** (config.alpha / 2.0))))
        self.horizon = config.t ** config.beta

    def replicate(self, index: int, rng: RandomStream) -> List[ResultRecord]:
        met = first_meeting_time(self.kernel, (0, 0), (self.distance, 0), self.horizon, rng)
        return [self.record(index, rng, 'no_meeting', 1.0 if met is None else 0.0,
                            alpha=self.config.alpha, beta=self.config.beta)]

    def limits(self) -> Dict[StatisticKey, float]:
        alpha, beta = self.config.alpha, self.config.beta
        return {('no_meeting', (alpha, beta, None)): erdos_taylor_limit(alpha, beta)}
