"""Fully specified deterministic shuffling for reproducible fold splits.

The generator is splitmix64 (Steele, Lea & Flood's SplittableRandom
finalizer): state advances by the golden-gamma constant 0x9E3779B97F4A7C15
and each output is mixed with the murmur-style constants
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. Shuffling is Fisher-Yates with
rejection sampling for unbiased bounded draws, so any implementation of
these constants reproduces the same permutations bit-for-bit.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform draw in [0, bound) without modulo bias."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound


def shuffled(items: list, seed: int) -> list:
    """New list with a Fisher-Yates shuffle driven by splitmix64."""
    rng = SplitMix64(seed)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out
