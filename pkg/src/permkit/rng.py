"""Seeded, counter-based random streams.

A stream is a Philox generator keyed by ``(seed, stream)``. Because Philox is
counter based, any position in a stream can be reached directly with
:meth:`RngStream.generator` and an ``offset``, which is how per-sample
reproducibility is obtained without generating the preceding samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "as_generator"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0
    algorithm: str = "philox4x64"

    def __post_init__(self):
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 <= self.stream <= _MASK64:
            raise ValueError("stream must be an unsigned 64-bit integer")

    def generator(self, offset: int = 0) -> np.random.Generator:
        """Generator positioned ``offset`` draws into the stream.

        ``offset`` counts 64-bit draws and must be a multiple of 4 (one Philox
        block).
        """
        if offset % 4:
            raise ValueError("offset must be a multiple of 4 draws")
        bitgen = np.random.Philox(key=self.seed | (self.stream << 64))
        if offset:
            bitgen = bitgen.advance(offset // 4)
        return np.random.Generator(bitgen)

    def substream(self, stream: int) -> "RngStream":
        return RngStream(self.seed, stream, self.algorithm)


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an :class:`RngStream`, an int seed or ``None``."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None:
        return np.random.default_rng()
    return RngStream(int(rng)).generator()
