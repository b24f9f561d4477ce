"""Deterministic sample streams built on the SplitMix64 mixer.

Every stochastic routine in the package draws from these helpers so that a
seed fixes the output bit-for-bit on any platform: the generator works in
wrapping uint64 arithmetic and never touches platform RNG state.
"""
from __future__ import annotations

import hashlib

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = 0xFFFFFFFFFFFFFFFF


def _finalize(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """n floats in [0, 1) from the SplitMix64 sequence for `seed`."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _finalize(np.uint64(seed & _MASK) + idx * _GAMMA)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def derive_seed(seed: int, *salts: int | str) -> int:
    """Deterministic child seed; distinct salts give decorrelated streams.

    String salts are folded through blake2s, never the builtin hash, so the
    derivation is stable across interpreter runs.
    """
    z = np.uint64(seed & _MASK)
    with np.errstate(over="ignore"):
        for salt in salts:
            if isinstance(salt, str):
                salt = int.from_bytes(
                    hashlib.blake2s(salt.encode(), digest_size=8).digest(), "big"
                )
            z = _finalize((z ^ np.uint64(salt & _MASK)) + _GAMMA)
    return int(z)
