"""
SplitMix64 pseudo-random generator

Specified by algorithm (Steele, Lea & Flood's 64-bit mixing generator) rather than by a
library, so bootstrap draws, feature subsets and split plans are reproducible bit-for-bit
in any language. Independent streams are derived from (seed, index...) tuples.
"""

from typing import List, MutableSequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Seed of the sub-stream addressed by indices"""
    state = seed & MASK64
    for index in indices:
        state = _mix((state + (index + 1) * GOLDEN_GAMMA) & MASK64)
    return state


class SplitMix64:
    """64-bit state, additive Weyl sequence, two xor-shift-multiply rounds"""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def stream(cls, seed: int, *indices: int) -> "SplitMix64":
        return cls(derive_seed(seed, *indices))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits"""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection"""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def shuffle(self, items: MutableSequence[T]) -> None:
        """In-place Fisher-Yates, drawing from the top index down"""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> List[int]:
        order = list(range(n))
        self.shuffle(order)
        return order

    def choices(self, n: int, k: int) -> List[int]:
        """k draws with replacement from range(n)"""
        return [self.randbelow(n) for _ in range(k)]
