"""Deterministic seed derivation for per-chain RNG streams.

Chain k of a run seeded with s draws from ``default_rng(substream(s, k))``.
The derivation is a splitmix64 step: add (k+1) times the 64-bit golden
ratio to the seed, then apply the splitmix64 finalizer. It is stationary
across platforms and Python versions (pure integer arithmetic), avoids
the correlated-streams pitfall of simple xor, and is documented here so
runs are reproducible from (seed, index) alone.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "rng_for"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """splitmix64 finalizer (Steele, Lea & Flood's output mix)."""
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def substream(seed: int, *indices: int) -> int:
    """Derive a 64-bit stream seed from a base seed and index path."""
    h = int(seed) & _MASK
    for idx in indices:
        h = _mix64((h + _GOLDEN * (int(idx) + 1)) & _MASK)
    return h


def rng_for(seed: int, *indices: int) -> np.random.Generator:
    """Generator for the given substream."""
    return np.random.default_rng(substream(seed, *indices))
