"""Deterministic pseudo-random generator used by the synthetic generator and
the probabilistic Hough sampler.

A 64-bit linear congruential generator with Knuth's MMIX constants:

    state' = (6364136223846793005 * state + 1442695040888963407) mod 2^64

The generator is specified explicitly (rather than deferring to a library
RNG) so that corpora and segment detections are bit-reproducible across
platforms, interpreter versions, and reimplementations.
"""

from __future__ import annotations

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg64:
    """Seeded 64-bit LCG. Top 32 bits of each step feed the draws."""

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & _MASK
        # warm up so small seeds diverge immediately
        self._step()
        self._step()

    def _step(self) -> int:
        self.state = (_MULT * self.state + _INC) & _MASK
        return self.state >> 32

    def next_u32(self) -> int:
        return self._step()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). n must be positive."""
        if n <= 0:
            raise ValueError("randrange() requires n > 0")
        # rejection sampling keeps the draw unbiased
        limit = (1 << 32) - ((1 << 32) % n)
        while True:
            v = self._step()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return self._step() / 4294967296.0

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
