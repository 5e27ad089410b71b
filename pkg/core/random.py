"""
Random streams for the simulators.

Each replicate owns exactly one RandomStream. The stream wraps a numpy
Generator and serves scalar draws from pre-drawn buffers, which keeps the
per-event cost of the Gillespie loops low without giving up reproducibility.
Replicate seeds are derived from a master seed with a SplitMix64 finaliser.
"""

from typing import Optional

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(master_seed: int, index: int) -> int:
    """
    Derive the seed of stream `index` from a master seed.

    Args:
        master_seed: Non-negative master seed
        index: Replicate (or auxiliary stream) index

    Returns:
        A 64-bit seed
    """
    z = (int(master_seed) + (int(index) + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RandomStream:
    """
    Buffered scalar access to a numpy Generator.

    Uniform and standard exponential variates are drawn in blocks; everything
    else is delegated to the wrapped generator, which stays available as
    `generator` for vectorised draws.
    """

    BUFFER_SIZE = 4096

    def __init__(self, seed: Optional[int] = None,
                 generator: Optional[np.random.Generator] = None):
        self.seed = seed
        self.generator = generator if generator is not None else np.random.default_rng(seed)
        self._uniforms = np.empty(0)
        self._uniform_pos = 0
        self._exponentials = np.empty(0)
        self._exponential_pos = 0

    @classmethod
    def for_replicate(cls, master_seed: int, replicate: int) -> "RandomStream":
        """Create the stream of one replicate."""
        return cls(mix64(master_seed, replicate))

    def uniform(self) -> float:
        """Draw a uniform variate in [0, 1)."""
        if self._uniform_pos >= self._uniforms.shape[0]:
            self._uniforms = self.generator.random(self.BUFFER_SIZE)
            self._uniform_pos = 0
        value = self._uniforms[self._uniform_pos]
        self._uniform_pos += 1
        return float(value)

    def exponential(self, rate: float) -> float:
        """Draw an exponential variate with the given rate."""
        if self._exponential_pos >= self._exponentials.shape[0]:
            self._exponentials = self.generator.standard_exponential(self.BUFFER_SIZE)
            self._exponential_pos = 0
        value = self._exponentials[self._exponential_pos]
        self._exponential_pos += 1
        return float(value) / rate

    def below(self, n: int) -> int:
        """Draw a uniform integer in {0, ..., n-1}."""
        k = int(self.uniform() * n)
        return k if k < n else n - 1

    def pair(self, n: int):
        """Draw an ordered pair of distinct integers in {0, ..., n-1}."""
        a = self.below(n)
        b = self.below(n - 1)
        if b >= a:
            b += 1
        return a, b

    def poisson(self, mean: float) -> int:
        """Draw a Poisson variate."""
        return int(self.generator.poisson(mean))

    def spawn(self) -> "RandomStream":
        """Create an independent child stream."""
        child_seed = int(self.generator.integers(0, 2 ** 63 - 1))
        return RandomStream(child_seed)
