"""Deterministic 64-bit random streams shared by the Python API and the kernels.

The generator is SplitMix64: a 64-bit counter advanced by a fixed odd
increment, hashed through a finalizer. It is trivially seedable, has no
warm-up, and the same recipe is easy to reproduce inside compiled kernels,
which is what makes run results independent of thread count and platform.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# A 53-bit mantissa divided by 2^53 gives a uniform double in [0, 1).
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """Finalizing hash of SplitMix64; a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Seedable stream of 64-bit words, uniforms and normals.

    The instance holds only the counter, exposed as ``state`` so callers can
    hand a stream to a compiled kernel and resume it afterwards. Normals come
    from Box-Muller using two uniforms each; the sine branch is discarded so
    every normal costs exactly two draws, keeping stream positions easy to
    reason about.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def normal(self, sigma: float = 1.0) -> float:
        """Gaussian with mean 0 and standard deviation ``sigma``."""
        u1 = self.uniform()
        u2 = self.uniform()
        return sigma * math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)


def derive_run_seed(base_seed: int, alpha_index: int, run_index: int) -> int:
    """Derive the stream seed for one run of a sweep.

    Injective over ``alpha_index, run_index < 2**32`` for a fixed base seed:
    the index pair packs into one 64-bit word, and both hashing steps are
    bijections, so distinct runs can never share a stream. Stable across
    releases; emitted files depend on it.
    """
    if alpha_index < 0 or run_index < 0:
        raise ValueError("indices must be non-negative")
    if alpha_index >= 1 << 32 or run_index >= 1 << 32:
        raise ValueError("indices above 2**32 would collide")
    packed = ((alpha_index << 32) | run_index) & MASK64
    return mix64((base_seed & MASK64) ^ mix64(packed))
