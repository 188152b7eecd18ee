"""Reproducible random streams.

Every stochastic operation in the package takes either an :class:`RngStream`
(a pure value: same stream, same draws) or an already-running
``numpy.random.Generator`` when the caller wants to consume a sequence across
several calls.  Streams are backed by the counter-based Philox cipher, so a
(seed, stream_id) pair addresses an independent sequence and parallel lanes
can derive non-overlapping children without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = (self.seed & _MASK64) | ((self.stream_id & _MASK64) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        """Derived stream for lane/sample ``index`` (0-based).

        Children of distinct (stream, index) pairs are distinct Philox keys;
        index 0 of the root does not collide with the root itself.
        """
        mixed = _splitmix64((self.stream_id & _MASK64) ^ _splitmix64(index + 1))
        return RngStream(self.seed, mixed)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    """Accept a stream or a generator; streams start fresh, generators pass through."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")
