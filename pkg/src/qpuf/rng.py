"""Seed fan-out.

Every random draw is taken from a Philox stream keyed by
``(experiment seed, purpose, chunk index)``.  Work is split into fixed-size
chunks so results do not depend on how chunks are scheduled.
"""

import zlib

import numpy as np

CHUNK = 1 << 14


def _purpose_key(purpose):
    if isinstance(purpose, int):
        return purpose
    return zlib.crc32(purpose.encode())


def stream(seed, purpose, index=0):
    ss = np.random.SeedSequence(int(seed), spawn_key=(_purpose_key(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def chunks(total, size=CHUNK):
    """Yield (chunk_index, start, stop) covering range(total)."""
    for i, start in enumerate(range(0, total, size)):
        yield i, start, min(start + size, total)
