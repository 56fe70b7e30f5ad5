"""Deterministic seeded randomness for every stochastic operation in the package.

The generator is SplitMix64.  Its entire definition is the three update
constants below, so any language can reproduce the exact stream:

    state   <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z       <- state
    z       <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z       <- (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output  <- z XOR (z >> 31)

Uniform doubles take the top 53 bits of an output word, giving values on
[0, 1).  Gaussians are derived from uniforms by the Box-Muller transform
(no rejection step), so the draw count per call is fixed and the stream
stays aligned across platforms.  Reruns with the same seed therefore
produce bit-identical draws, which is what makes the CSV artifacts of the
command line runners byte-identical.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential SplitMix64 stream with convenience samplers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        # 53-bit mantissa, exact dyadic rational in [0, 1).
        u = (self.next_u64() >> 11) * (2.0**-53)
        return lo + (hi - lo) * u

    def uniforms(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return np.array([self.uniform(lo, hi) for _ in range(n)], dtype=float)

    def normal(self) -> float:
        # Box-Muller; consumes exactly two words.  u1 is shifted away from 0.
        u1 = max(self.uniform(), 2.0**-53)
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, *shape: int) -> np.ndarray:
        n = 1
        for s in shape:
            n *= s
        out = np.array([self.normal() for _ in range(n)], dtype=float)
        return out.reshape(shape) if shape else out.reshape(())

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] via rejection-free modular draw.

        The modulo bias is below 2^-40 for the ranges used here (< 2^24),
        which is irrelevant for Monte-Carlo estimates but keeps the draw
        count deterministic.
        """
        span = hi - lo + 1
        if span <= 0:
            raise ValueError("integer(lo, hi) needs lo <= hi")
        return lo + self.next_u64() % span

    def spawn(self, stream: int) -> "SplitMix64":
        """Independent substream; used to partition seeds across jobs.

        Substream k of seed s is seeded with mix(s + (k+1)*GAMMA), so the
        partition is reproducible no matter how many workers consume it.
        """
        return SplitMix64(_mix((self._state + (stream + 1) * _GAMMA) & _MASK))
