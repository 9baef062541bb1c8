# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: MZI node application and counter-based click sampling.

Must stay bit-identical to ``_fallback.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, uint8_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


def apply_nodes(double complex[:, ::1] state, long[::1] uppers,
                double[::1] cos_t, double[::1] sin_t,
                double[::1] phase_re, double[::1] phase_im):
    cdef Py_ssize_t k, col, u
    cdef Py_ssize_t ncols = state.shape[1]
    cdef Py_ssize_t nnodes = uppers.shape[0]
    cdef double c, s, pr, pi_, ar, ai, br, bi, tr, ti
    with nogil:
        for k in range(nnodes):
            u = uppers[k]
            c = cos_t[k]
            s = sin_t[k]
            pr = phase_re[k]
            pi_ = phase_im[k]
            for col in range(ncols):
                tr = state[u, col].real
                ti = state[u, col].imag
                ar = pr * tr - pi_ * ti
                ai = pr * ti + pi_ * tr
                br = state[u + 1, col].real
                bi = state[u + 1, col].imag
                # c*a + i*s*b ; i*s*a + c*b
                state[u, col] = (c * ar - s * bi) + 1j * (c * ai + s * br)
                state[u + 1, col] = (c * br - s * ai) + 1j * (c * bi + s * ar)
    return np.asarray(state)


def any_click(keys, offsets, long n_photons, probs):
    cdef uint64_t[::1] k = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef uint64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.uint64)
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t n = k.shape[0]
    out_arr = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef long j
    cdef uint64_t z
    cdef double u
    with nogil:
        for i in range(n):
            for j in range(n_photons):
                z = k[i] + (off[i] + <uint64_t>(j + 1)) * GOLDEN
                u = <double>(_mix64(z) >> 11) * INV_2_53
                if u < p[i]:
                    out[i] = 1
                    break
    return out_arr
