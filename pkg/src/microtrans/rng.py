"""Deterministic 64-bit pseudorandom generator (SplitMix64).

SplitMix64 is used for every random choice that must be reproducible from a
user-supplied seed independently of platform or library version: hard-tier
leet substitution, corpus shuffling/splitting, and per-sentence sub-seed
derivation. The algorithm is Steele, Lea & Flood's SplitMix64 with its
standard constants (increment 0x9E3779B97F4A7C15 and the two finalizer
multipliers below); any implementation of it yields identical streams.
"""

from collections.abc import MutableSequence

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective avalanche mix."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derive a sub-seed from a master seed and an index path.

    Used to give every (sentence, variant) its own generator so corpus
    generation can be partitioned across workers without changing output.
    """
    s = seed & _MASK
    for p in path:
        s = mix64(s ^ mix64((p + _GAMMA) & _MASK))
    return s


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("randbelow() requires n >= 1")
        if n == 1:
            return 0
        reject_below = (1 << 64) % n
        while True:
            r = self.next_u64()
            if r >= reject_below:
                return r % n

    def shuffle(self, seq: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
