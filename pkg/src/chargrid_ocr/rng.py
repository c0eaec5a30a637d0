"""SplitMix64, vectorised.

SplitMix64 is counter based: output ``k`` (1-based) is ``mix(seed + k * GAMMA)``,
so a block of outputs is one numpy expression and any language with 64-bit
wrapping arithmetic reproduces the stream bit for bit. Sub-streams come from
:func:`derive_seed`, which depends only on the parent seed and a key, never on
how much of the parent stream was consumed.
"""
from __future__ import annotations

import numpy as np

ALGORITHM = "splitmix64"
MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a labelled sub-stream, e.g. ``derive_seed(s, page, GRID_XC)``."""
    s = seed & MASK64
    for k in keys:
        s = mix64(s ^ mix64((k & MASK64) + GAMMA))
    return s


class SplitMix64:
    algorithm = ALGORITHM

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.position = 0

    def next_u64(self, n: int) -> np.ndarray:
        counters = np.arange(self.position + 1, self.position + n + 1, dtype=np.uint64)
        self.position += n
        with np.errstate(over="ignore"):
            return _mix_array(np.uint64(self.seed) + counters * np.uint64(GAMMA))

    def random(self, n: int) -> np.ndarray:
        """Uniform doubles in [0, 1) from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def normal(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller (cosine branch only, two draws each)."""
        u = self.random(2 * n).reshape(n, 2) if n else np.zeros((0, 2))
        return np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])

    def integers(self, low: int, high: int, n: int) -> np.ndarray:
        """Integers in [low, high); floor of a scaled uniform, bias below 2^-53 * span."""
        if high <= low:
            raise ValueError("empty integer range")
        return low + np.floor(self.random(n) * (high - low)).astype(np.int64)

    def uniform(self, low: float, high: float, n: int) -> np.ndarray:
        return low + (high - low) * self.random(n)

    # scalar conveniences for layout code
    def randint(self, low: int, high_inclusive: int) -> int:
        return int(self.integers(low, high_inclusive + 1, 1)[0])

    def uniform1(self, low: float, high: float) -> float:
        return float(self.uniform(low, high, 1)[0])
