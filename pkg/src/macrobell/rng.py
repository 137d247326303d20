"""Counter-based pseudo-random numbers with documented, portable semantics.

The generator is the SplitMix64 construction (Steele, Lea & Vigna's
published 64-bit mixer over a Weyl sequence), used here in pure counter
form so that any value of any stream can be computed independently:

    GAMMA = 0x9E3779B97F4A7C15                       (64-bit golden ratio)
    key(seed, stream)   = mix64(seed + GAMMA * (stream + 1)   mod 2^64)
    value(key, counter) = mix64(key  + GAMMA * (counter + 1)  mod 2^64)

where ``mix64`` is the SplitMix64 finalizer.  Uniform doubles take the top
53 bits: u = (value >> 11) * 2^-53, giving u in [0, 1).

Because values are pure functions of (seed, stream, counter), splitting a
counter range across workers cannot change any draw: results are identical
for every partitioning.  Everything is computed with 64-bit integer
arithmetic only, so streams reproduce bit for bit across platforms and
implementations.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

_U_GAMMA = np.uint64(GAMMA)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / float(1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python integer (mod 2^64)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def stream_key(seed: int, stream: int) -> int:
    """Key of substream ``stream`` under ``seed``."""
    return mix64((seed + GAMMA * (stream + 1)) & _MASK)


def value(seed: int, stream: int, counter: int) -> int:
    """The ``counter``-th 64-bit value of the given substream."""
    return mix64((stream_key(seed, stream) + GAMMA * (counter + 1)) & _MASK)


def uniform(seed: int, stream: int, counter: int) -> float:
    """The ``counter``-th uniform double in [0, 1) of the given substream."""
    return (value(seed, stream, counter) >> 11) * _INV_2_53


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U30)) * _M1
    z = (z ^ (z >> _U27)) * _M2
    return z ^ (z >> _U31)


def uniforms(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized :func:`uniform` over an array of counter indices."""
    key = np.uint64(stream_key(seed, stream))
    c = np.asarray(counters).astype(np.uint64)
    with np.errstate(over="ignore"):
        z = _mix64_np(key + _U_GAMMA * (c + np.uint64(1)))
    return (z >> _U11).astype(np.float64) * _INV_2_53
