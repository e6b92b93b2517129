"""Deterministic, keyed random substreams.

Every stochastic stage of a simulation drop draws from its own generator,
keyed by (master seed, drop index, stage tag, extra keys).  Streams are
independent of execution order and of which other stages exist, so drops
can run in parallel and adding a new stage never perturbs existing ones.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"substream keys must be non-negative, got {key}")
        return int(key)
    if isinstance(key, str):
        digest = hashlib.blake2s(key.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"substream keys must be int or str, got {type(key)!r}")


def substream(master_seed: int, *keys) -> np.random.Generator:
    """Generator for the substream identified by (master_seed, *keys).

    Same key tuple always yields the same stream; any change to any
    component yields a statistically independent one.
    """
    entropy = [_key_to_int(master_seed)] + [_key_to_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
