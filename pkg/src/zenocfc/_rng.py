"""Counter-based uniform generator shared by both kernel backends.

The value for (key, counter) is the SplitMix64 output for state
``key + (counter + 1) * GOLDEN``, so any photon in any trial can be drawn
without touching the others.  The compiled kernel implements the same
arithmetic; the two must stay bit-identical.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_MULT = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)


def mix64(z):
    """SplitMix64 finalizer on Python ints or uint64 arrays."""
    if isinstance(z, np.ndarray):
        z = z.astype(np.uint64, copy=True)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
        return z
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream_id: int) -> int:
    base = mix64((seed + GOLDEN) & MASK64)
    return mix64((base + (stream_id * STREAM_MULT)) & MASK64)


def stream_keys(seed: int, stream_ids: np.ndarray) -> np.ndarray:
    """Vectorized :func:`stream_key` over an array of stream ids."""
    base = np.uint64(mix64((seed + GOLDEN) & MASK64))
    ids = np.asarray(stream_ids, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(base + ids * np.uint64(STREAM_MULT))


def derive_seed(seed: int, index: int) -> int:
    """Child seed for sub-experiment ``index`` (e.g. one sweep cell)."""
    return mix64((mix64(seed & MASK64) ^ mix64((index + 1) * GOLDEN & MASK64)) & MASK64)


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) for counters ``start .. start+count-1``."""
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = mix64(np.uint64(key) + counters * np.uint64(GOLDEN))
    return (bits >> np.uint64(11)).astype(np.float64) * INV_2_53
