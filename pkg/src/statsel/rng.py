"""Deterministic counter-based random streams.

Philox generators keyed by integer tuples are statistically independent
and bitwise reproducible across platforms, so data generation and
training can parallelize without any seed bookkeeping.
"""

import zlib

import numpy as np


def stream(*key) -> np.random.Generator:
    """Generator for the given key; equal keys give equal streams.

    Key parts are integers; strings are folded to integers with CRC32 so
    call sites can tag stream purposes readably ("init", "order", ...).
    """
    parts = [zlib.crc32(p.encode()) if isinstance(p, str) else int(p) for p in key]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(parts)))
