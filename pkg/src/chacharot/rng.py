"""Seedable SplitMix64 generator.

The stream for seed ``s`` is ``mix(s + i * GAMMA)`` for ``i = 1, 2, ...``
(all arithmetic mod 2^64), where ``mix`` is the standard SplitMix64
finalizer. Because output ``i`` depends only on the seed and the counter, any
range of the stream can be generated independently, which is what the
vectorized helper and the parallel samplers rely on.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _C1) & MASK64
    z = ((z ^ (z >> 27)) * _C2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential view of the stream; ``next_u64`` returns output 1, 2, ..."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` (Lemire's multiply-and-reject, exact)."""
        if not 0 < n <= 1 << 64:
            raise ValueError(f"bound out of range: {n}")
        m = self.next_u64() * n
        low = m & MASK64
        if low < n:
            threshold = ((1 << 64) - n) % n
            while low < threshold:
                m = self.next_u64() * n
                low = m & MASK64
        return m >> 64

    def spawn(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())


def derive_seed(master: int, index: int) -> int:
    """Seed of substream ``index``: output ``index + 1`` of the master stream."""
    return mix64(master + (index + 1) * GAMMA)


def splitmix64_block(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start + 1 .. start + count`` of the stream as a uint64 array.

    Matches ``SplitMix64(seed)`` skipped ahead by ``start`` draws.
    """
    base = (seed + (start + 1) * GAMMA) & MASK64
    z = np.arange(count, dtype=np.uint64) * np.uint64(GAMMA) + np.uint64(base)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
    return z ^ (z >> np.uint64(31))
