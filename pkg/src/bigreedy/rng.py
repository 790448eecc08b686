"""Counter-based stream derivation.

Every random stream is a pure function of an integer key path such as
``(base_seed, algorithm_hash, repeat, round, sample)``, so results never
depend on evaluation order or thread count.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _entropy(keys) -> list[int]:
    out = []
    for k in keys:
        k = int(k)
        if k < 0:
            k &= _MASK64
        out.append(k)
    return out


def seed_sequence(*keys) -> np.random.SeedSequence:
    return np.random.SeedSequence(_entropy(keys))


def stream(*keys) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(*keys)))


def fingerprint(*keys) -> int:
    """64-bit fingerprint of the stream for ``keys``."""
    lo, hi = seed_sequence(*keys).generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def child_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 63-bit key from ``rng`` for per-sample sub-streams."""
    return int(rng.integers(0, 2**63 - 1))
