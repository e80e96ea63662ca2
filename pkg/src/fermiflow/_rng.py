"""Seed handling: one root seed, split into independent named streams."""

from __future__ import annotations

import numpy as np


def stream_generator(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream indices).

    Distinct stream tuples give statistically independent streams for the
    same root seed, so parallel sampling stays reproducible.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))
