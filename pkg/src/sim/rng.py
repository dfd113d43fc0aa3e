"""
Seedable random streams.

A stream is identified by (seed, run_number, stream_id). The seed is the
global experiment seed, the run number is varied between replications and
the stream id separates independent consumers inside one run. The triple
feeds a numpy SeedSequence spawn key, so distinct run numbers give
statistically independent PCG64 streams.
"""

import numpy as np

_MAX_SEED = 2 ** 64 - 1


class RngStream:
    """Deterministic uniform [0, 1) source."""

    BLOCK_SIZE = 4096

    def __init__(self, seed: int, run_number: int, stream_id: int = 0):
        if not 0 <= seed <= _MAX_SEED:
            raise ValueError(f"seed must fit in 64 bits, got {seed}")
        if run_number < 0 or stream_id < 0:
            raise ValueError("run_number and stream_id must be non-negative")

        self.seed = seed
        self.run_number = run_number
        self.stream_id = stream_id

        sequence = np.random.SeedSequence(entropy=seed, spawn_key=(run_number, stream_id))
        self._generator = np.random.Generator(np.random.PCG64(sequence))
        self._block = self._generator.random(self.BLOCK_SIZE)
        self._index = 0

    def uniform(self) -> float:
        if self._index == self.BLOCK_SIZE:
            self._block = self._generator.random(self.BLOCK_SIZE)
            self._index = 0
        value = self._block[self._index]
        self._index += 1
        return float(value)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, run={self.run_number}, stream={self.stream_id})"


def rng_uniform(stream: RngStream) -> float:
    """Draw one uniform real in [0, 1) from `stream`."""
    return stream.uniform()
