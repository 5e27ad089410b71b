"""
Continuous-time random walk primitives.

Walks jump at rate 1 with steps from a WalkKernel. Jump counts are drawn as
Poisson variates, so positions at fixed times are exact. Meeting times of two
independent walks are computed through their difference walk, which jumps at
rate 2 with the symmetrised kernel and is simulated in vectorised chunks.
"""

import itertools
import logging
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from ..core.exceptions import ContractViolation
from ..core.lattice import ORIGIN, Site, sup_distance, sup_norm
from ..core.random import RandomStream
from .kernel import WalkKernel

logger = logging.getLogger('coalsim.walks')

FIRST_CHUNK = 256
MAX_CHUNK = 1 << 16


def sample_displacement(kernel: WalkKernel, rng: RandomStream) -> Site:
    """Draw one jump of the walk."""
    return kernel.sample(rng)


def walk_position(kernel: WalkKernel, start: Site, duration: float, rng: RandomStream) -> Site:
    """
    Position of a rate-1 walk after the given duration.

    Args:
        kernel: Jump kernel
        start: Starting site
        duration: Elapsed time, non-negative
        rng: Random stream

    Returns:
        The site reached

    Raises:
        ContractViolation: If duration is negative
    """
    if duration < 0:
        raise ContractViolation(f"walk duration must be non-negative, got {duration}")
    jumps = rng.poisson(duration) if duration > 0 else 0
    if jumps == 0:
        return start
    dx, dy = kernel.sample_many(rng, jumps)
    return (start[0] + int(dx.sum()), start[1] + int(dy.sum()))


def first_meeting_time(kernel: WalkKernel, x: Site, y: Site, horizon: float,
                       rng: RandomStream) -> Optional[float]:
    """
    First time two independent walks from x and y share a site.

    Returns None when they have not met by the horizon.
    """
    if horizon < 0:
        raise ContractViolation(f"meeting horizon must be non-negative, got {horizon}")
    if x == y:
        return 0.0
    if horizon == 0:
        return None

    difference = kernel.difference()
    zx, zy = x[0] - y[0], x[1] - y[1]
    clock = 0.0
    chunk = FIRST_CHUNK

    while True:
        times = clock + np.cumsum(rng.generator.standard_exponential(chunk) / 2.0)
        dx, dy = difference.sample_many(rng, chunk)
        px = zx + np.cumsum(dx)
        py = zy + np.cumsum(dy)

        hits = np.flatnonzero((px == 0) & (py == 0))
        if hits.size and times[hits[0]] <= horizon:
            return float(times[hits[0]])
        if times[-1] > horizon:
            return None

        clock = float(times[-1])
        zx, zy = int(px[-1]), int(py[-1])
        chunk = min(chunk * 2, MAX_CHUNK)


def meeting_probability(kernel: WalkKernel, x: Site, y: Site, horizon: float,
                        radius: int = 6) -> float:
    """
    Probability that walks from x and y meet by the horizon.

    Exact up to truncation: the difference walk is confined to Λ(radius) and
    is killed when it leaves, which only loses mass for paths that wander far.

    Raises:
        ContractViolation: If the start lies outside the truncation box
    """
    start = (x[0] - y[0], x[1] - y[1])
    if sup_norm(start) > radius:
        raise ContractViolation(f"difference {start} lies outside the truncation radius {radius}")
    if start == ORIGIN:
        return 1.0

    sites = [(a, b) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)]
    position = {site: k for k, site in enumerate(sites)}
    generator = np.zeros((len(sites), len(sites)))
    difference = kernel.difference()

    for site, k in position.items():
        if site == ORIGIN:
            continue
        generator[k, k] = -2.0
        for (dx, dy), p in difference.steps:
            target = position.get((site[0] + dx, site[1] + dy))
            if target is not None:
                generator[k, target] += 2.0 * p

    transition = expm(generator * horizon)
    return float(transition[position[start], position[ORIGIN]])


def contained_in_annulus(positions: Sequence[Site], alpha: float, c: float, t: float) -> bool:
    """
    Whether all pairwise ∞-norm distances lie in
    [t^{α/2} / (c log t), c log t · t^{α/2}].
    """
    if t <= 1:
        raise ContractViolation(f"annulus predicate needs t > 1, got {t}")
    if c <= 0:
        raise ContractViolation(f"annulus predicate needs c > 0, got {c}")
    if len(positions) < 2:
        return True

    scale = t ** (alpha / 2.0)
    spread = c * math.log(t)
    lower, upper = scale / spread, scale * spread
    return all(lower <= sup_distance(a, b) <= upper
               for a, b in itertools.combinations(positions, 2))


def erdos_taylor_limit(alpha: float, beta: float) -> float:
    """Limiting probability α/β ∧ 1 that walks at distance t^{α/2} miss by t^β."""
    if alpha <= 0 or beta <= 0:
        raise ContractViolation(f"Erdős–Taylor limit needs positive exponents, got {alpha}, {beta}")
    return min(alpha / beta, 1.0)


def displacement_tail(kernel: WalkKernel, t: float, us: Iterable[float], replicates: int,
                      rng: RandomStream) -> List[float]:
    """Empirical P{‖X_t‖∞ > u√t} for each u, from shared walk samples."""
    us = list(us)
    jumps = rng.generator.poisson(t, size=replicates)
    norms = np.empty(replicates)
    for k, n in enumerate(jumps):
        if n == 0:
            norms[k] = 0.0
            continue
        dx, dy = kernel.sample_many(rng, int(n))
        norms[k] = max(abs(int(dx.sum())), abs(int(dy.sum())))
    scale = math.sqrt(t)
    return [float(np.mean(norms > u * scale)) for u in us]


def fit_tail_constant(us: Sequence[float], probabilities: Sequence[float]) -> float:
    """
    Fit c₀ in P{‖X_t‖ > u√t} ≈ e^{-c₀ u}.

    Least-squares slope of -log p against u through the origin, using only
    the positive probabilities.

    Raises:
        ContractViolation: If no tail probability is positive
    """
    points = [(float(u), -math.log(p)) for u, p in zip(us, probabilities) if p > 0]
    if not points:
        raise ContractViolation("tail fit needs at least one positive probability")
    u = np.array([point[0] for point in points])
    y = np.array([point[1] for point in points])
    c0 = float(np.dot(u, y) / np.dot(u, u))
    logger.debug("tail constant fitted", extra={'c0': c0, 'points': len(points)})
    return c0
