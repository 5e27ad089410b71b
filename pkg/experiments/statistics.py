"""
Statistical gates for the Monte Carlo harness.

Empirical laws of integer statistics are compared through their total
variation distance and a chi-square test. Cells with small expected counts
are pooled with their neighbours before the chi-square statistic is formed.
"""

import logging
import math
from collections import Counter
from typing import Dict, Hashable, Iterable, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.stats import chi2_contingency, chisquare

from ..core.exceptions import ContractViolation

logger = logging.getLogger('coalsim.experiments')

MIN_EXPECTED = 5.0


class DistributionComparison(NamedTuple):
    total_variation: float
    chi_square_p: float
    cells: int


def empirical_pmf(sample: Iterable[Hashable]) -> Dict[Hashable, float]:
    """Empirical law of a sample of integers or tuples of integers."""
    counts = Counter(sample)
    total = sum(counts.values())
    if total == 0:
        raise ContractViolation("empirical law of an empty sample")
    return {value: count / total for value, count in counts.items()}


def total_variation(sample_a: Iterable[int], sample_b: Iterable[int]) -> float:
    """Total variation distance between two empirical laws."""
    first, second = empirical_pmf(sample_a), empirical_pmf(sample_b)
    support = set(first) | set(second)
    return 0.5 * sum(abs(first.get(k, 0.0) - second.get(k, 0.0)) for k in support)


def total_variation_to_law(sample: Iterable[int], law: Mapping[int, float]) -> float:
    """Total variation distance between an empirical law and an exact one."""
    empirical = empirical_pmf(sample)
    support = set(empirical) | set(law)
    return 0.5 * sum(abs(empirical.get(k, 0.0) - float(law.get(k, 0.0))) for k in support)


def pool_cells(weights: Sequence[float], columns: Sequence[Sequence[float]],
               threshold: float) -> List[List[float]]:
    """
    Pool adjacent cells until each pooled cell carries at least `threshold`
    weight.

    Args:
        weights: Per-cell weight deciding the pooling
        columns: Per-cell vectors summed together with their cells
        threshold: Minimal pooled weight

    Returns:
        The pooled columns; a short remainder joins the last pooled cell
    """
    pooled: List[List[float]] = []
    current, current_weight = None, 0.0
    for weight, column in zip(weights, columns):
        current = list(column) if current is None else [a + b for a, b in zip(current, column)]
        current_weight += weight
        if current_weight >= threshold:
            pooled.append(current)
            current, current_weight = None, 0.0
    if current is not None:
        if pooled:
            pooled[-1] = [a + b for a, b in zip(pooled[-1], current)]
        else:
            pooled.append(current)
    return pooled


def compare_distributions(sample_a: Sequence[int], sample_b: Sequence[int],
                          min_expected: float = MIN_EXPECTED) -> DistributionComparison:
    """
    Compare two integer samples.

    The chi-square test of homogeneity runs on the 2×K table of counts over
    the sorted pooled support, after adjacent cells have been pooled so that
    every expected count reaches min_expected.

    Returns:
        Total variation, chi-square p-value and the number of cells tested.
        A table that pools down to a single cell yields p = 1.

    Raises:
        ContractViolation: If either sample is empty
    """
    if len(sample_a) == 0 or len(sample_b) == 0:
        raise ContractViolation("distribution comparison needs two non-empty samples")

    distance = total_variation(sample_a, sample_b)
    counts_a, counts_b = Counter(sample_a), Counter(sample_b)
    support = sorted(set(counts_a) | set(counts_b))
    rows = (len(sample_a), len(sample_b))
    total = rows[0] + rows[1]

    # expected count of a column in the smaller row
    weights = [(counts_a[k] + counts_b[k]) * min(rows) / total for k in support]
    columns = [(counts_a[k], counts_b[k]) for k in support]
    pooled = pool_cells(weights, columns, min_expected)

    if len(pooled) < 2:
        logger.warning("chi-square pooling left a single cell",
                       extra={'support': len(support), 'samples': rows})
        return DistributionComparison(distance, 1.0, len(pooled))

    table = np.array(pooled, dtype=float).T
    p_value = float(chi2_contingency(table, correction=False)[1])
    return DistributionComparison(distance, p_value, len(pooled))


def goodness_of_fit(sample: Sequence[int], law: Mapping[int, float],
                    min_expected: float = MIN_EXPECTED) -> DistributionComparison:
    """
    Compare a sample against an exact law.

    Observed values outside the law's support enter as cells with expected
    count zero and are pooled into their neighbours.
    """
    if len(sample) == 0:
        raise ContractViolation("goodness of fit needs a non-empty sample")

    distance = total_variation_to_law(sample, law)
    counts = Counter(int(v) for v in sample)
    n = len(sample)
    support = sorted(set(counts) | {k for k, p in law.items() if p > 0})
    expected = [n * float(law.get(k, 0.0)) for k in support]
    columns = [(counts[k], e) for k, e in zip(support, expected)]
    pooled = pool_cells(expected, columns, min_expected)

    if len(pooled) < 2:
        logger.warning("goodness-of-fit pooling left a single cell", extra={'support': len(support)})
        return DistributionComparison(distance, 1.0, len(pooled))

    observed = np.array([cell[0] for cell in pooled], dtype=float)
    predicted = np.array([cell[1] for cell in pooled], dtype=float)
    predicted *= observed.sum() / predicted.sum()
    p_value = float(chisquare(observed, predicted)[1])
    return DistributionComparison(distance, p_value, len(pooled))


def summarize(values: Sequence[float]) -> Tuple[float, float]:
    """Sample mean and its standard error."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        return math.nan, math.nan
    if data.size == 1:
        return float(data[0]), 0.0
    return float(data.mean()), float(data.std(ddof=1) / math.sqrt(data.size))


def binomial_stderr(p: float, n: int) -> float:
    """Standard error of an empirical frequency with true value p."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / n) if n > 0 else math.inf


def empirical_tail(sample: Sequence[int], n_max: int) -> np.ndarray:
    """P̂{X >= n} for n = 1..n_max."""
    data = np.asarray(sample)
    return np.array([float(np.mean(data >= n)) for n in range(1, n_max + 1)])
