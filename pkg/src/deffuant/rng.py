"""Seeded pseudo-random streams used throughout the engine.

The generator is xoshiro256** (period 2**256 - 1), seeded by expanding a
single 64-bit seed through the splitmix64 sequence.  The same algorithm is
implemented twice: here in pure Python (reference path, used by the
single-event API and the tests) and in `_kernels` on uint64 arrays (hot
path).  Both consume raw outputs identically, so a simulation advanced one
event at a time matches the compiled loop bit for bit.

Uniform doubles take the top 53 bits of an output; bounded integers use
bitmask rejection, which is exactly uniform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# splitmix64 sequence increment and finalizer multipliers.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit avalanche bijection."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_MULT_1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_MULT_2) & _MASK64
    return z ^ (z >> 31)


def expand_seed(seed: int) -> tuple[int, int, int, int]:
    """Expand a 64-bit seed into a nonzero xoshiro256** state via splitmix64."""
    z = seed & _MASK64
    state = []
    for _ in range(4):
        z = (z + GOLDEN_GAMMA) & _MASK64
        state.append(mix64(z))
    if not any(state):
        state[0] = GOLDEN_GAMMA
    return tuple(state)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** stream with state exchangeable with the compiled kernels."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        self._s0, self._s1, self._s2, self._s3 = expand_seed(seed)

    def next_u64(self) -> int:
        s1 = self._s1
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        self._s2 ^= self._s0
        self._s3 ^= s1
        self._s1 = s1 ^ self._s2
        self._s0 ^= self._s3
        self._s2 ^= t
        self._s3 = _rotl(self._s3, 45)
        return result

    def uniform01(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits of one output."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randbelow(self, n: int) -> int:
        """Exactly uniform integer in [0, n) via bitmask rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            v = self.next_u64() & mask
            if v < n:
                return v

    def state_array(self) -> np.ndarray:
        """Copy the state into a uint64[4] array for the compiled kernels."""
        return np.array([self._s0, self._s1, self._s2, self._s3], dtype=np.uint64)

    def set_state_array(self, state: np.ndarray) -> None:
        """Resume from a state array mutated by a kernel."""
        self._s0, self._s1, self._s2, self._s3 = (int(x) for x in state)
