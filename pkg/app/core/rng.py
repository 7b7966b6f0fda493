"""
Seeded random streams.

A replication is identified by integer keys (typically (n, rep)); its
stream depends only on (master_seed, keys), never on scheduling order.
"""
from __future__ import annotations

import numpy as np


def replication_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Return an independent generator for one replication.

    Args:
        master_seed: Experiment-wide seed (any nonnegative 64-bit integer)
        *keys: Replication identifiers, e.g. sample size and replication index

    Returns:
        numpy Generator seeded from SeedSequence(master_seed, spawn_key=keys)
    """
    seq = np.random.SeedSequence(
        entropy=int(master_seed) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=tuple(int(k) for k in keys),
    )
    return np.random.default_rng(seq)
