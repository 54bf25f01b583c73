"""Deterministic counter-based random number generation.

Every output word is ``mix64(seed + (counter + 1) * GAMMA)`` where ``mix64``
is the splitmix64 finalizer, so the stream is a pure function of
(seed, counter).  All arithmetic is 64-bit unsigned with wraparound, which
gives bit-identical streams on every platform, and any slice of the stream
can be generated independently of the rest.
"""

from __future__ import annotations

import math

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_MASK = 0xFFFFFFFFFFFFFFFF

_TWO_M53 = 2.0 ** -53


def mix64(z):
    """splitmix64 finalizer on uint64 scalars or arrays."""
    z = np.uint64(z) if np.isscalar(z) else z
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX_A
        z = (z ^ (z >> np.uint64(27))) * _MIX_B
        return z ^ (z >> np.uint64(31))


class Rng:
    """Counter-based generator: same seed, same stream, any platform."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def __repr__(self):
        return f"Rng(seed={self.seed:#x}, counter={self.counter})"

    def u64(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit words."""
        if count < 0:
            raise ValueError("count must be nonnegative")
        idx = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        self.counter += count
        with np.errstate(over="ignore"):
            return mix64(np.uint64(self.seed) + idx * _GAMMA)

    def uniform(self, count: int) -> np.ndarray:
        """Uniform float64 samples in [0, 1) using the top 53 bits."""
        return (self.u64(count) >> np.uint64(11)).astype(np.float64) * _TWO_M53

    def normal(self, count: int) -> np.ndarray:
        """Standard normal samples via Box-Muller (fixed word consumption)."""
        m = (count + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 in (2^-53, 1], log is finite
        theta = (2.0 * math.pi) * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return z[:count]

    def rademacher(self, count: int) -> np.ndarray:
        """Samples from {-1.0, +1.0} with equal probability."""
        return 1.0 - 2.0 * (self.u64(count) >> np.uint64(63)).astype(np.float64)

    def integers(self, bound: int, count: int) -> np.ndarray:
        """Uniform integers in [0, bound).

        Uses word % bound: the modulo bias (< bound / 2^64) is negligible for
        the subset sizes used here, and integer arithmetic keeps the result
        platform-exact.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        return (self.u64(count) % np.uint64(bound)).astype(np.int64)

    def subset(self, n: int, k: int) -> np.ndarray:
        """Uniform random size-k subset of range(n) by Fisher-Yates prefix."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = np.arange(n)
        words = self.u64(k)  # one word per swap
        for j in range(k):
            r = j + int(words[j]) % (n - j)
            pool[j], pool[r] = pool[r], pool[j]
        return np.sort(pool[:k])

    def child(self, index: int) -> "Rng":
        """Independent generator derived by hashing (seed, index)."""
        if index < 0:
            raise ValueError("index must be nonnegative")
        with np.errstate(over="ignore"):
            key = mix64(np.uint64(self.seed) ^ mix64(np.uint64(index + 1) * _GAMMA))
        return Rng(int(key))
