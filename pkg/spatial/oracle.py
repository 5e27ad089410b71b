"""
Exact merge probabilities on a two-site torus.

Two blocks on the torus {0, 1} × {0} form a three-state chain: together
and unmerged, apart, or merged. A kernel step moves a block to the other
site exactly when its horizontal displacement is odd, so each block hops at
rate p_odd; co-located blocks merge at rate γ.
"""

import csv
from typing import Iterable, List, Optional, TextIO, Tuple

import numpy as np
from scipy.linalg import expm

from ..core.exceptions import ContractViolation
from ..walks.kernel import WalkKernel

TOGETHER, APART, MERGED = 0, 1, 2


def two_site_generator(gamma: float = 1.0, kernel: Optional[WalkKernel] = None) -> np.ndarray:
    """Generator of the (together, apart, merged) chain."""
    if gamma < 0:
        raise ContractViolation(f"coalescence rate must be non-negative, got {gamma}")
    kernel = kernel or WalkKernel.simple()
    hop = sum(p for (dx, _), p in kernel.steps if dx % 2 == 1)

    generator = np.zeros((3, 3))
    generator[TOGETHER, APART] = 2.0 * hop
    generator[TOGETHER, MERGED] = gamma
    generator[APART, TOGETHER] = 2.0 * hop
    np.fill_diagonal(generator, -generator.sum(axis=1))
    return generator


def two_site_merge_probability(s: float, gamma: float = 1.0, together: bool = True,
                               kernel: Optional[WalkKernel] = None) -> float:
    """
    P{merged by time s} for two blocks on the two-site torus.

    Args:
        s: Time, s >= 0
        gamma: Pair coalescence rate
        together: Start on the same site, otherwise on different sites
        kernel: Jump kernel, simple walk by default
    """
    if s < 0:
        raise ContractViolation(f"time must be non-negative, got {s}")
    transition = expm(two_site_generator(gamma, kernel) * s)
    start = TOGETHER if together else APART
    return float(transition[start, MERGED])


def two_site_table(times: Iterable[float], gammas: Iterable[float] = (1.0,)) -> List[Tuple[float, float, float]]:
    """Rows (s, gamma, merged probability) started together."""
    return [(float(s), float(g), two_site_merge_probability(s, g))
            for g in gammas for s in times]


def write_two_site_table(rows: Iterable[Tuple[float, float, float]], stream: TextIO) -> None:
    """Write oracle rows as CSV with columns s, gamma, probability."""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['s', 'gamma', 'probability'])
    for s, gamma, probability in rows:
        writer.writerow([repr(float(s)), repr(float(gamma)), repr(float(probability))])
