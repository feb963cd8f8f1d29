"""Seeded counter-based random streams."""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream) -> np.random.Generator:
    """Philox generator keyed by a seed and an optional tuple of stream ids."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
