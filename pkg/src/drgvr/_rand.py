"""Seed-stream policy.

Philox is counter-based, so per-(seed, key) streams are independent and
reproducible regardless of execution order across replicas.
"""

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, key...). Same args, same stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))))
