"""Splittable deterministic RNG streams.

Every random object in the package is keyed by (master seed, integer key
path) through numpy's SeedSequence, so ensembles are reproducible and
independent of execution order or thread count.
"""

from __future__ import annotations

import numpy as np


def child_seed(master: int, *keys: int) -> int:
    """A derived 63-bit seed for the given key path."""
    ss = np.random.SeedSequence(entropy=(int(master),) + tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def rng_for(master: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=(int(master),) + tuple(int(k) for k in keys))
    return np.random.default_rng(ss)
