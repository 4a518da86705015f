"""Deterministic PRNG used for shuffling, masking, and review sampling.

The generator is xoshiro256** seeded through splitmix64, chosen over the
stdlib Mersenne Twister so that shuffles and draws can be reproduced
bit-for-bit by reimplementations in other languages. Constants below are the
published ones for both algorithms.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1

# splitmix64 constants
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** (multiplier 5, rotation 7, scrambler 9; shifts 17/45)."""

    def __init__(self, seed: int) -> None:
        # Expand the (possibly small or negative) seed into four nonzero
        # 64-bit state words with splitmix64.
        x = seed & _MASK64
        state = []
        for _ in range(4):
            x = (x + _SM_GAMMA) & _MASK64
            z = x
            z = ((z ^ (z >> 30)) * _SM_MIX1) & _MASK64
            z = ((z ^ (z >> 27)) * _SM_MIX2) & _MASK64
            state.append((z ^ (z >> 31)) & _MASK64)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def uniform(self) -> float:
        """Uniform float in [0, 1) using the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def shuffle(self, items: List[T]) -> None:
        """In-place Fisher-Yates shuffle, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence[T], n: int) -> List[T]:
        """Uniform sample of n distinct positions, drawn without replacement."""
        if n < 0 or n > len(population):
            raise ValueError("sample size out of range")
        pool = list(population)
        self.shuffle(pool)
        return pool[:n]

    def choice(self, population: Sequence[T]) -> T:
        return population[self.next_below(len(population))]


def derive_seed(global_seed: int, index: int) -> int:
    """Per-record seed: splitmix64 finalizer over seed and index.

    A plain XOR would be symmetric in its arguments and give correlated
    streams across nearby global seeds; the multiply-shift mix avoids both.
    """
    z = (global_seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def shuffled(items: Iterable[T], seed: int) -> List[T]:
    out = list(items)
    Xoshiro256StarStar(seed).shuffle(out)
    return out
