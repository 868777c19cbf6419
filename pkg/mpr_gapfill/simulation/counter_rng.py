#!/usr/bin/env python3
"""
Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by a
hash of (master seed, stream tag, counters...). Arrays are always drawn for
the whole grid in row-major order, so the value a site receives depends only
on the key and the site index, never on how the work is split across threads.
"""

import numpy as np

MASK64 = (1 << 64) - 1

STREAM_INIT = 1
STREAM_SWEEP = 2
STREAM_THINNING = 3
STREAM_SYNTHETIC = 4
STREAM_CALIBRATION = 5
STREAM_REALIZATION = 6


def _entropy(seed: int, words) -> list:
    return [int(seed) & MASK64] + [int(w) & MASK64 for w in words]


def counter_generator(seed: int, *words: int) -> np.random.Generator:
    """Philox generator keyed by (seed, *words)."""
    state = np.random.SeedSequence(_entropy(seed, words)).generate_state(2, dtype=np.uint64)
    key = int(state[0]) | (int(state[1]) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *words: int) -> int:
    """A 64-bit child seed, e.g. one simulation seed per validation realization."""
    return int(np.random.SeedSequence(_entropy(seed, words)).generate_state(1, dtype=np.uint64)[0])
