"""
Random walk kernels on Z².

A WalkKernel is a finite table of (displacement, probability) pairs. The
walk jumps at rate 1 and draws each jump from the table. Construction
validates the assumptions the scaling results rely on: probabilities sum to
one, the mean displacement is zero and the support generates Z².
"""

import bisect
import json
import math
from functools import reduce
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import ContractViolation
from ..core.lattice import Site
from ..core.random import RandomStream

Step = Tuple[Site, float]

PROBABILITY_TOLERANCE = 1e-9
MEAN_TOLERANCE = 1e-12


class WalkKernel:
    """
    Finite-range, zero-mean, irreducible jump kernel.

    Args:
        steps: Sequence of ((dx, dy), probability) pairs; repeated
            displacements are accumulated

    Raises:
        ContractViolation: If the table violates a kernel invariant
    """

    def __init__(self, steps: Sequence[Step]):
        table: Dict[Site, float] = {}
        for (dx, dy), p in steps:
            if p < 0:
                raise ContractViolation(f"kernel probability must be non-negative, got {p}")
            if p > 0:
                key = (int(dx), int(dy))
                table[key] = table.get(key, 0.0) + float(p)

        if not table:
            raise ContractViolation("kernel needs at least one step with positive probability")

        total = sum(table.values())
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ContractViolation(f"kernel probabilities must sum to 1, got {total}")

        mean_x = sum(dx * p for (dx, _), p in table.items())
        mean_y = sum(dy * p for (_, dy), p in table.items())
        if abs(mean_x) > MEAN_TOLERANCE or abs(mean_y) > MEAN_TOLERANCE:
            raise ContractViolation(f"kernel must have zero mean, got ({mean_x}, {mean_y})")

        if not _generates_lattice(list(table)):
            raise ContractViolation("kernel support does not generate Z², walk is not irreducible")

        self.displacements: List[Site] = sorted(table)
        self.probabilities = np.array([table[d] for d in self.displacements]) / total
        self.dx = np.array([d[0] for d in self.displacements], dtype=np.int64)
        self.dy = np.array([d[1] for d in self.displacements], dtype=np.int64)
        self._cumulative = list(np.cumsum(self.probabilities))
        self._cumulative[-1] = 1.0

    @classmethod
    def simple(cls) -> "WalkKernel":
        """Nearest-neighbour simple random walk."""
        return cls([((1, 0), 0.25), ((-1, 0), 0.25), ((0, 1), 0.25), ((0, -1), 0.25)])

    @classmethod
    def from_json(cls, source: Union[str, Path, list]) -> "WalkKernel":
        """
        Load a kernel from a JSON list of {"dx": int, "dy": int, "p": float}.

        Args:
            source: A file path, a JSON string or an already decoded list
        """
        if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith('[')):
            with open(source, 'r') as f:
                entries = json.load(f)
        elif isinstance(source, str):
            entries = json.loads(source)
        else:
            entries = source

        if not isinstance(entries, list):
            raise ContractViolation("kernel file must contain a JSON list")

        steps = []
        for entry in entries:
            try:
                dx, dy, p = entry['dx'], entry['dy'], entry['p']
            except (KeyError, TypeError):
                raise ContractViolation(f"kernel entry needs dx, dy and p: {entry!r}")
            if not isinstance(dx, int) or not isinstance(dy, int):
                raise ContractViolation(f"kernel displacements must be integers: {entry!r}")
            steps.append(((dx, dy), float(p)))
        return cls(steps)

    def to_json(self) -> str:
        return json.dumps([
            {'dx': int(dx), 'dy': int(dy), 'p': float(p)}
            for (dx, dy), p in zip(self.displacements, self.probabilities)
        ])

    @property
    def steps(self) -> List[Step]:
        return [(d, float(p)) for d, p in zip(self.displacements, self.probabilities)]

    def difference(self) -> "WalkKernel":
        """
        Kernel of X - Y for two independent copies, run at rate 2.

        Each jump of the difference walk is a step of X or the negated step of
        Y with equal chance.
        """
        steps = [((dx, dy), p / 2.0) for (dx, dy), p in self.steps]
        steps += [((-dx, -dy), p / 2.0) for (dx, dy), p in self.steps]
        return WalkKernel(steps)

    def sample(self, rng: RandomStream) -> Site:
        k = bisect.bisect_right(self._cumulative, rng.uniform())
        return self.displacements[min(k, len(self.displacements) - 1)]

    def sample_many(self, rng: RandomStream, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Draw n steps at once, returned as (dx, dy) arrays."""
        choice = rng.generator.choice(len(self.displacements), size=n, p=self.probabilities)
        return self.dx[choice], self.dy[choice]

    def __repr__(self):
        return f"WalkKernel({self.steps!r})"


def _generates_lattice(vectors: List[Site]) -> bool:
    """True iff the integer span of the vectors is all of Z²."""
    determinants = [
        a[0] * b[1] - a[1] * b[0]
        for i, a in enumerate(vectors)
        for b in vectors[i + 1:]
    ]
    return reduce(math.gcd, (abs(d) for d in determinants), 0) == 1
