"""Counter-based pseudo-random numbers (SplitMix64).

Every Monte Carlo quantity in this library is drawn from SplitMix64, chosen
because it is a pure function of (seed, counter): the i-th output of a stream
is

    mix64(seed + (i + 1) * 0x9E3779B97F4A7C15  mod 2**64)

with the standard finalizer

    z ^= z >> 30; z *= 0xBF58476D1FCE4E5B
    z ^= z >> 27; z *= 0x94D049BB133111EB
    z ^= z >> 31

Uniform doubles in [0, 1) take the top 53 bits: (z >> 11) * 2**-53.  The
constants above fully specify the stream, so runs are bit-reproducible and
the generator can be re-implemented from this docstring alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1FCE4E5B
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z = x & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


@dataclass
class SplitMix64:
    """A stream position: seed identifies the stream, counter the offset.

    The object mutates its counter as values are drawn; pass it explicitly
    wherever randomness is consumed so provenance stays visible.
    """

    seed: int
    counter: int = 0

    def __post_init__(self):
        self.seed &= _MASK

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * _GAMMA) & _MASK)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53

    def u64_block(self, count: int) -> np.ndarray:
        """Vectorized draw of `count` raw words, bit-identical to next_u64."""
        idx = np.arange(self.counter + 1, self.counter + count + 1,
                        dtype=np.uint64)
        self.counter += count
        z = (np.uint64(self.seed) + idx * np.uint64(_GAMMA))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def unit_block(self, count: int) -> np.ndarray:
        """Vectorized uniforms in [0, 1)."""
        return (self.u64_block(count) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def split(self) -> "SplitMix64":
        """Child stream seeded from the next word of this one."""
        return SplitMix64(self.next_u64())
