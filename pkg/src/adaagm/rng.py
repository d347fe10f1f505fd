"""Portable deterministic random numbers for experiment start points.

Uses xorshift64* with splitmix64 seeding: pure 64-bit integer arithmetic,
so streams are bit-identical across platforms and numpy versions.  Normal
variates come from Box-Muller on the generator's uniforms.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* generator; the nonzero state is derived via splitmix64."""

    def __init__(self, seed: int):
        state, z = splitmix64(seed & _MASK)
        while z == 0:
            state, z = splitmix64(state)
        self._state = z

    def next_u64(self) -> int:
        x = self._state
        x ^= (x >> 12)
        x = (x ^ (x << 25)) & _MASK
        x ^= (x >> 27)
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """Uniform in (0, 1]; never zero, so it is safe under log()."""
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normal_vector(self, n: int, scale: float = 1.0) -> np.ndarray:
        return np.array([scale * self.normal() for _ in range(n)])


def cell_seed(problem_index: int, solver_index: int, seed: int) -> int:
    """Mix (problem index, solver index, seed) into one 64-bit cell seed."""
    state = 0
    for part in (problem_index, solver_index, seed):
        state, out = splitmix64((state ^ (part & _MASK)) & _MASK)
        state = out
    return state
