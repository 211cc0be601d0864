"""SplitMix64 streams, written out so results are reproducible bit for bit.

Generator: the state advances by the golden-ratio increment
``0x9E3779B97F4A7C15`` (mod 2**64) and each output is :func:`mix64` of the new
state. Trial ``t`` of an experiment seeded with ``master`` starts from
``derive_seed(master, t)``, the ``t + 1``-th output of SplitMix64 seeded with
``master``, so a trial's stream depends only on ``(master, t)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    return mix64(master + GOLDEN_GAMMA * (index + 1))


class RngStream:
    """A single SplitMix64 stream. Mutable; one per trajectory."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def for_trial(cls, master: int, index: int) -> "RngStream":
        return cls(derive_seed(master, index))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Exactly uniform integer in ``[0, bound)`` by rejection.

        ``bound == 1`` consumes nothing. Larger bounds read ``k`` words per
        attempt (most significant first), with ``k`` the fewest words covering
        ``bound - 1``.
        """
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        words = max(1, -(-(bound - 1).bit_length() // 64))
        span = 1 << (64 * words)
        limit = span - span % bound
        while True:
            u = 0
            for _ in range(words):
                u = (u << 64) | self.next_u64()
            if u < limit:
                return u % bound


# vectorized counterparts; uint64 arithmetic wraps modulo 2**64

def mix64_np(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seeds_np(master: int, indices: np.ndarray) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.uint64) + np.uint64(1)
    with np.errstate(over="ignore"):
        z = np.uint64(master & MASK64) + np.uint64(GOLDEN_GAMMA) * idx
    return mix64_np(z)


def advance_np(state: np.ndarray) -> np.ndarray:
    """Advance each stream in place and return its next output."""
    with np.errstate(over="ignore"):
        state += np.uint64(GOLDEN_GAMMA)
    return mix64_np(state)
