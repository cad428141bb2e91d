"""Seeded random streams.

Every sampler takes an explicit ``numpy.random.Generator``. Independent trials
get disjoint child streams keyed by the trial index, so results do not depend
on execution order.
"""

import numpy as np


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
