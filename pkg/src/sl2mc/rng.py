"""Counter-based reproducible random streams (splitmix64).

Replica r of a run seeded with ``master_seed`` uses the stream

    state_0 = mix64((master_seed + (r + 1) * GOLDEN) mod 2^64)
    state_{n+1} = (state_n + GOLDEN) mod 2^64
    u_n = (mix64(state_{n+1}) >> 11) * 2^-53        in [0, 1)

with GOLDEN = 0x9E3779B97F4A7C15 and the splitmix64 finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

All arithmetic is modulo 2^64.  The stream for a replica is a pure
function of (master_seed, r), so results never depend on how replicas
are scheduled across threads.  The Monte Carlo kernels re-implement the
identical recurrence; tests compare the two bit for bit.
"""

from __future__ import annotations

import numpy as np

__all__ = ["GOLDEN", "mix64", "stream_state", "SplitMix64"]

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = float(2.0**-53)


def mix64(z: np.uint64) -> np.uint64:
    """splitmix64 finalizer (64-bit avalanche mix)."""
    z = np.uint64(z)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        return z ^ (z >> _S31)


def stream_state(master_seed: int, replica: int) -> np.uint64:
    """Initial stream state for a replica; pure function of its arguments."""
    with np.errstate(over="ignore"):
        return mix64(np.uint64(master_seed) + np.uint64(replica + 1) * GOLDEN)


class SplitMix64:
    """Mutable stream handle; one uniform consumes one state increment."""

    __slots__ = ("state",)

    def __init__(self, state: int) -> None:
        self.state = np.uint64(state)

    @staticmethod
    def for_replica(master_seed: int, replica: int) -> "SplitMix64":
        return SplitMix64(stream_state(master_seed, replica))

    def next_uint64(self) -> np.uint64:
        with np.errstate(over="ignore"):
            self.state = self.state + GOLDEN
            return mix64(self.state)

    def uniform(self) -> float:
        return float(self.next_uint64() >> _S11) * _INV53
