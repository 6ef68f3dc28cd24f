"""Seeded, splittable random streams.

Every stochastic operation in the package takes an explicit seed and derives
its draws from a counter-based Philox generator. Streams are split by an
integer path (e.g. (estimate index, sample index)) so that an estimate's
randomness is independent of evaluation order and of how work is divided
across workers.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))
