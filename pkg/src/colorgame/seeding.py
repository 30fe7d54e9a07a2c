"""Seed derivation.

Every random stream in the package is a numpy ``Generator`` over the PCG64
bit generator.  Child seeds are derived with ``numpy.random.SeedSequence``
keyed by (master seed, *keys), so a playout's randomness depends only on its
coordinates in a sweep and never on scheduling order.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(master: int, *keys: int) -> int:
    """Return a 64-bit seed for the stream addressed by ``keys``."""
    ss = np.random.SeedSequence(entropy=int(master) & MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    if keys:
        seed = derive_seed(seed, *keys)
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
