"""Deterministic RNG derivation.

All randomness in the package flows from one root seed. Sub-streams
(per trial, per grid cell, per node) are derived by feeding the root
seed plus integer indices into ``numpy.random.SeedSequence``, which
mixes the key material platform-independently. There is no global RNG
state anywhere.
"""

from __future__ import annotations

import numpy as np


def spawn_rng(*key: int) -> np.random.Generator:
    """Generator for a hierarchical key (root seed followed by indices)."""
    return np.random.default_rng(np.random.SeedSequence(key))


def derive_seed(*key: int) -> int:
    """Collapse a hierarchical key to a single 63-bit integer seed."""
    state = np.random.SeedSequence(key).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
