"""Named random streams derived from one integer seed."""

from __future__ import annotations

import zlib

import numpy as np

STREAMS = ("graph", "roles", "shuffle", "selection", "behavior")


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for ``name``; other names never perturb its draws."""
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))
