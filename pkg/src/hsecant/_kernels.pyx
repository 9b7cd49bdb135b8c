# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Philox4x64-10 and the per-unit invalid-IV replication loop.

Both must match the numpy code in ``_fallback.py``: Philox words bit for
bit, estimates up to summation order and libm rounding.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    """
    #define _GNU_SOURCE
    #include <math.h>
    #include <stdint.h>
    static inline void philox4x64_10(const uint64_t ctr_in[4], const uint64_t key_in[2],
                                     uint64_t out[4]) {
        const uint64_t M0 = 0xD2E7470EE14C6C93ULL, M1 = 0xCA5A826395121157ULL;
        const uint64_t W0 = 0x9E3779B97F4A7C15ULL, W1 = 0xBB67AE8584CAA73BULL;
        uint64_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
        uint64_t k0 = key_in[0], k1 = key_in[1];
        for (int r = 0; r < 10; ++r) {
            if (r) { k0 += W0; k1 += W1; }
            __uint128_t p0 = (__uint128_t)M0 * c0;
            __uint128_t p1 = (__uint128_t)M1 * c2;
            uint64_t hi0 = (uint64_t)(p0 >> 64), lo0 = (uint64_t)p0;
            uint64_t hi1 = (uint64_t)(p1 >> 64), lo1 = (uint64_t)p1;
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }
    """
    void philox4x64_10(const uint64_t* ctr, const uint64_t* key, uint64_t* out) nogil
    void sincos(double x, double* s, double* c) nogil

cdef enum:
    MAX_ATTEMPTS = 10000
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


def philox_raw(uint64_t seed, uint64_t stream_id, uint64_t lane, uint64_t attempt,
               uint64_t first_block, int64_t n_blocks):
    """Raw words of blocks ``first_block ...`` at counter ``[block, lane, attempt, 0]``."""
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(4 * n_blocks, dtype=np.uint64)
    cdef uint64_t ctr[4]
    cdef uint64_t key[2]
    cdef uint64_t buf[4]
    cdef int64_t b
    cdef int j
    key[0] = seed
    key[1] = stream_id
    ctr[1] = lane
    ctr[2] = attempt
    ctr[3] = 0
    for b in range(n_blocks):
        ctr[0] = first_block + <uint64_t>b
        philox4x64_10(ctr, key, buf)
        for j in range(4):
            out[4 * b + j] = buf[j]
    return out


cdef inline void _accumulate(uint64_t w, double z, uint64_t t_thr, uint64_t d_thr,
                             double slope, double sd_eps, int64_t* counts,
                             double* sums) noexcept nogil:
    # counts: n_t1, k_t1, k_t0, n_d1; sums: y|T=1, y|T=0, y|D=1, y|D=0
    cdef int64_t t = (w >> 32) < t_thr
    cdef int64_t d = (w & 0xFFFFFFFFULL) < d_thr
    cdef double tf = <double>t, df = <double>d
    cdef double y = slope * df + sd_eps * z
    counts[0] += t
    counts[1] += t & d
    counts[2] += (1 - t) & d
    counts[3] += d
    sums[0] += tf * y
    sums[1] += (1.0 - tf) * y
    sums[2] += df * y
    sums[3] += (1.0 - df) * y


cdef int _one_replication(uint64_t seed, uint64_t stream_id, uint64_t lane, uint64_t attempt,
                          int64_t n_units, uint64_t t_thr, uint64_t d_thr,
                          double slope, double sd_eps,
                          double* beta_iv, double* beta_ls) noexcept nogil:
    cdef uint64_t ctr[4]
    cdef uint64_t key[2]
    cdef uint64_t buf[4]
    cdef int64_t counts[4]
    cdef double sums[4]
    cdef int64_t blk, n_pairs = n_units // 2
    cdef double u1, u2, rad, sn, cs
    cdef int j
    for j in range(4):
        counts[j] = 0
        sums[j] = 0.0
    key[0] = seed
    key[1] = stream_id
    ctr[1] = lane
    ctr[2] = attempt
    ctr[3] = 0
    for blk in range((n_units + 1) // 2):
        ctr[0] = <uint64_t>blk
        philox4x64_10(ctr, key, buf)
        u1 = (<double>((buf[2] >> 11) + 1)) * INV_2_53
        u2 = (<double>(buf[3] >> 11)) * INV_2_53
        rad = sqrt(-2.0 * log(u1))
        sincos(TWO_PI * u2, &sn, &cs)
        _accumulate(buf[0], rad * cs, t_thr, d_thr, slope, sd_eps, counts, sums)
        if blk < n_pairs:
            _accumulate(buf[1], rad * sn, t_thr, d_thr, slope, sd_eps, counts, sums)
    cdef int64_t n_t1 = counts[0], k_t1 = counts[1], k_t0 = counts[2], n_d1 = counts[3]
    cdef int64_t n_t0 = n_units - n_t1, n_d0 = n_units - n_d1
    if n_t1 == 0 or n_t0 == 0 or n_d1 == 0 or n_d0 == 0:
        return 0
    if k_t1 * n_t0 == k_t0 * n_t1:
        return 0
    beta_iv[0] = (sums[0] / n_t1 - sums[1] / n_t0) / (<double>k_t1 / n_t1 - <double>k_t0 / n_t0)
    beta_ls[0] = sums[2] / n_d1 - sums[3] / n_d0
    return 1


def iv_units(uint64_t seed, uint64_t stream_id, int64_t rep_start, int64_t rep_stop,
             int64_t n_units, uint64_t t_thr, uint64_t d_thr, double slope, double sd_eps,
             double[::1] beta_iv, double[::1] beta_ls, int64_t[::1] redraws):
    """Fill ``beta_iv/beta_ls/redraws[rep - rep_start]`` for ``rep`` in ``[rep_start, rep_stop)``.

    Replication ``rep`` uses lane ``rep + 1``; a degenerate draw moves to the
    next attempt.  Returns the number of replications that ran out of attempts.
    """
    cdef int64_t rep, j
    cdef uint64_t attempt
    cdef int ok
    cdef int64_t failures = 0
    with nogil:
        for rep in range(rep_start, rep_stop):
            j = rep - rep_start
            ok = 0
            attempt = 0
            while attempt < MAX_ATTEMPTS:
                ok = _one_replication(seed, stream_id, <uint64_t>(rep + 1), attempt, n_units,
                                      t_thr, d_thr, slope, sd_eps, &beta_iv[j], &beta_ls[j])
                if ok:
                    break
                attempt += 1
            redraws[j] = <int64_t>attempt
            if not ok:
                failures += 1
    return failures
