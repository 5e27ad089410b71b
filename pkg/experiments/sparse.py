"""
Limit law of sparse coalescents.

N particles started at mutual distances of order t^{α/2} have, at time t^β,
a block count whose limit law p_{N,k}(α/β) satisfies an integral recursion
in N. Differentiated in τ = log(β/α), the recursion becomes the linear system

    d/dτ p_{n,k} = C(n,2)·(p_{n-1,k} - p_{n,k}),   p_{n,k}(0) = 1{n = k},

which is integrated here for all n <= N at once. The result coincides with
the marginal law of the Kingman block count started from N after time τ.
"""

import math

import numpy as np
from scipy.integrate import odeint

from ..core.exceptions import ContractViolation

MAX_SPARSE_SIZE = 6
RTOL = 1e-12
ATOL = 1e-14


def _layout(n: int):
    """Offsets of the rows p_{m,·}, m = 1..n, in the flat state vector."""
    offsets = [0]
    for m in range(1, n + 1):
        offsets.append(offsets[-1] + m)
    return offsets


def _rhs(state: np.ndarray, _tau: float, n: int, offsets) -> np.ndarray:
    derivative = np.zeros_like(state)
    for m in range(2, n + 1):
        rate = m * (m - 1) / 2.0
        row = state[offsets[m - 1]:offsets[m]]
        below = np.zeros(m)
        below[:m - 1] = state[offsets[m - 2]:offsets[m - 1]]
        derivative[offsets[m - 1]:offsets[m]] = rate * (below - row)
    return derivative


def sparse_recursion_table(n: int, alpha_over_beta: float) -> np.ndarray:
    """
    Limit law of #C^α_{t^β} for n initial particles.

    Args:
        n: Number of particles, 1 <= n <= 6
        alpha_over_beta: Ratio α/β in (0, 1]

    Returns:
        Probability vector indexed by k - 1, k = 1..n

    Raises:
        ContractViolation: If n or the ratio is out of range
    """
    if not 1 <= n <= MAX_SPARSE_SIZE:
        raise ContractViolation(f"sparse recursion supports 1 <= N <= {MAX_SPARSE_SIZE}, got {n}")
    if not 0 < alpha_over_beta <= 1:
        raise ContractViolation(f"ratio alpha/beta must lie in (0, 1], got {alpha_over_beta}")

    tau = math.log(1.0 / alpha_over_beta)
    offsets = _layout(n)
    initial = np.zeros(offsets[-1])
    for m in range(1, n + 1):
        initial[offsets[m - 1] + m - 1] = 1.0
    if tau == 0:
        return initial[offsets[n - 1]:offsets[n]].copy()

    solution = odeint(_rhs, initial, np.array([0.0, tau]), args=(n, offsets),
                      rtol=RTOL, atol=ATOL)
    law = solution[-1, offsets[n - 1]:offsets[n]]
    return np.clip(law, 0.0, 1.0)


def first_coalescence_limit(n: int, alpha_over_beta: float) -> float:
    """Limit of P{#C^α_{t^β} = N} = (α/β)^{C(N,2)}."""
    if not 0 < alpha_over_beta <= 1:
        raise ContractViolation(f"ratio alpha/beta must lie in (0, 1], got {alpha_over_beta}")
    return alpha_over_beta ** (n * (n - 1) / 2.0)
