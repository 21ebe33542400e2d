"""Seed handling.

Every random stream is a Philox (counter-based) generator keyed by the
user's 64-bit seed plus a tuple of integers naming the stream, e.g.
``generator(seed, 3, 17)`` for sample 17 of grid point 3. Streams with
different keys are independent and do not depend on evaluation order.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=tuple(int(k) for k in key))


def generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *key)))


def child_seed(seed: int, *key: int) -> int:
    """A derived 64-bit integer seed, for APIs that take plain ints."""
    return int(seed_sequence(seed, *key).generate_state(1, dtype=np.uint64)[0])
