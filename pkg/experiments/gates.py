"""
Truncation-stability gates for the limit objects.

Limit objects that start from infinitely many blocks are sampled from a
finite truncation N. A gate draws the relevant joint statistic at N and at
2N and reports the total variation distance between the two empirical laws;
a small distance shows the truncation no longer matters.
"""

import logging
from typing import Sequence, Tuple

from ..core.random import RandomStream
from ..kingman.coalescent import truncation_stability
from ..kingman.merging import n_mer, simulate_merging
from ..kingman.rebirth import n_alpha, simulate_rebirth
from .statistics import total_variation

logger = logging.getLogger('coalsim.experiments')

GATE_TOLERANCE = 0.02


def _rebirth_vector(log_grid: Sequence[float], truncation: int, pair_rate: float,
                    rng: RandomStream) -> Tuple[int, ...]:
    state = simulate_rebirth(log_grid[0], log_grid[-1], 0.0, truncation, pair_rate, rng)
    return tuple(n_alpha(state, s) for s in log_grid)


def rebirth_stability(log_grid: Sequence[float], truncation: int, samples: int,
                      rng: RandomStream, pair_rate: float = 1.0) -> float:
    """
    TV between the joint laws of (N_{α_1}, ..., N_{α_m}) at truncation N and 2N.

    Args:
        log_grid: Increasing log α grid; its ends bound the rebirth window
        truncation: Truncation N
        samples: Samples per side
        rng: Random stream
        pair_rate: Coalescence rate per pair
    """
    first = [_rebirth_vector(log_grid, truncation, pair_rate, rng) for _ in range(samples)]
    second = [_rebirth_vector(log_grid, 2 * truncation, pair_rate, rng) for _ in range(samples)]
    return total_variation(first, second)


def _merging_vector(merge_log_times: Sequence[float], eval_log_time: float, truncation: int,
                    pair_rate: float, rng: RandomStream) -> Tuple[int, ...]:
    state = simulate_merging(merge_log_times, eval_log_time, truncation, rng, pair_rate)
    return tuple(n_mer(state, i) for i in range(1, state.m + 1))


def merging_stability(merge_log_times: Sequence[float], eval_log_time: float, truncation: int,
                      samples: int, rng: RandomStream, pair_rate: float = 1.0) -> float:
    """TV between the joint laws of (N^mer_1, ..., N^mer_m) at truncation N and 2N."""
    first = [_merging_vector(merge_log_times, eval_log_time, truncation, pair_rate, rng)
             for _ in range(samples)]
    second = [_merging_vector(merge_log_times, eval_log_time, 2 * truncation, pair_rate, rng)
              for _ in range(samples)]
    return total_variation(first, second)


def entrance_stability(duration: float, truncation: int, samples: int, rng: RandomStream,
                       pair_rate: float = 1.0) -> float:
    """TV between entrance-law counts at truncation N and 2N."""
    return truncation_stability(duration, pair_rate, truncation, samples, rng)


def check_gate(name: str, distance: float, truncation: int,
               tolerance: float = GATE_TOLERANCE) -> bool:
    """Log the outcome of a gate; a failure is a warning and does not stop the run."""
    passed = distance < tolerance
    if passed:
        logger.info(f"truncation gate {name} passed",
                    extra={'tv': distance, 'truncation': truncation})
    else:
        logger.warning(f"truncation gate {name} failed",
                       extra={'tv': distance, 'truncation': truncation, 'tolerance': tolerance})
    return passed
