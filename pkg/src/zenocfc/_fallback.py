"""Pure numpy implementations of the hot kernels.

Signatures match ``_kernels.pyx`` exactly so :mod:`zenocfc.backend` can swap
them without callers noticing.
"""

from __future__ import annotations

import numpy as np

from ._rng import GOLDEN, INV_2_53, mix64

# rows * photons drawn per vectorized block
_BLOCK = 1 << 22


def apply_nodes(state, uppers, cos_t, sin_t, phase_re, phase_im):
    """Apply 2x2 MZI transfers in order, in place, to a (W, K) complex array.

    Node k maps (a, b) on modes (u, u+1) to
    (c e^{i phi} a + i s b, i s e^{i phi} a + c b).
    """
    for k in range(len(uppers)):
        u = uppers[k]
        c = cos_t[k]
        s = sin_t[k]
        ph = complex(phase_re[k], phase_im[k])
        a = state[u] * ph
        b = state[u + 1].copy()
        state[u] = c * a + 1j * s * b
        state[u + 1] = 1j * s * a + c * b
    return state


def any_click(keys, offsets, n_photons, probs):
    """For each row i, 1 if any of ``n_photons`` uniforms falls below probs[i].

    Row i draws counters ``offsets[i] .. offsets[i] + n_photons - 1`` from
    stream ``keys[i]``.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    offsets = np.asarray(offsets, dtype=np.uint64)
    probs = np.asarray(probs, dtype=np.float64)
    n = keys.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return out
    per_block = max(1, _BLOCK // max(1, n_photons))
    photon_block = min(n_photons, _BLOCK)
    with np.errstate(over="ignore"):
        for r0 in range(0, n, per_block):
            r1 = min(n, r0 + per_block)
            hit = np.zeros(r1 - r0, dtype=bool)
            for j0 in range(0, n_photons, photon_block):
                j1 = min(n_photons, j0 + photon_block)
                ctr = np.arange(j0 + 1, j1 + 1, dtype=np.uint64)
                states = keys[r0:r1, None] + (offsets[r0:r1, None] + ctr[None, :]) * np.uint64(GOLDEN)
                u = (mix64(states) >> np.uint64(11)).astype(np.float64) * INV_2_53
                hit |= (u < probs[r0:r1, None]).any(axis=1)
            out[r0:r1] = hit
    return out
