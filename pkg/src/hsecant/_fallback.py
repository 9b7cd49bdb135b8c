"""Pure-numpy twins of the compiled kernels in ``_kernels.pyx``."""
from __future__ import annotations

import math

import numpy as np

from .rng import lane_bitgen

_INV_2_53 = 1.0 / 9007199254740992.0
_MAX_ATTEMPTS = 10000
_LOW32 = np.uint64(0xFFFFFFFF)


def philox_raw(seed, stream_id, lane, attempt, first_block, n_blocks):
    bg = lane_bitgen(seed, stream_id, lane, attempt)
    if first_block:
        bg.advance(first_block)
    return bg.random_raw(4 * n_blocks)


def _one_replication(seed, stream_id, lane, attempt, n_units, t_thr, d_thr, slope, sd_eps):
    n_blocks = (n_units + 1) // 2
    raw = lane_bitgen(seed, stream_id, lane, attempt).random_raw(4 * n_blocks).reshape(n_blocks, 4)
    u1 = ((raw[:, 2] >> np.uint64(11)) + np.uint64(1)).astype(float) * _INV_2_53
    u2 = (raw[:, 3] >> np.uint64(11)).astype(float) * _INV_2_53
    rad = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    z = np.column_stack([rad * np.cos(angle), rad * np.sin(angle)]).ravel()[:n_units]
    w = raw[:, :2].ravel()[:n_units]
    t = (w >> np.uint64(32)) < np.uint64(t_thr)
    d = (w & _LOW32) < np.uint64(d_thr)
    y = slope * d + sd_eps * z

    n_t1 = int(t.sum())
    n_d1 = int(d.sum())
    n_t0, n_d0 = n_units - n_t1, n_units - n_d1
    if min(n_t1, n_t0, n_d1, n_d0) == 0:
        return None
    k_t1 = int((t & d).sum())
    k_t0 = n_d1 - k_t1
    if k_t1 * n_t0 == k_t0 * n_t1:
        return None
    y_t1 = y[t].sum()
    y_t0 = y[~t].sum()
    y_d1 = y[d].sum()
    y_d0 = y[~d].sum()
    beta_iv = (y_t1 / n_t1 - y_t0 / n_t0) / (k_t1 / n_t1 - k_t0 / n_t0)
    beta_ls = y_d1 / n_d1 - y_d0 / n_d0
    return beta_iv, beta_ls


def iv_units(seed, stream_id, rep_start, rep_stop, n_units, t_thr, d_thr, slope, sd_eps,
             beta_iv, beta_ls, redraws):
    failures = 0
    for rep in range(rep_start, rep_stop):
        j = rep - rep_start
        for attempt in range(_MAX_ATTEMPTS):
            res = _one_replication(seed, stream_id, rep + 1, attempt, n_units, t_thr, d_thr,
                                   slope, sd_eps)
            if res is not None:
                beta_iv[j], beta_ls[j] = res
                break
        else:
            attempt = _MAX_ATTEMPTS
            failures += 1
        redraws[j] = attempt
    return failures
