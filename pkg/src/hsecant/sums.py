"""Law of ``scale * (Y_1 + ... + Y_n)`` for iid standard HS variables.

Closed-form densities are used for ``n = 1`` (the HS density) and ``n = 2``
(``(u/2) csch(pi*u/2)`` in standard units).  For ``n >= 3`` the density and
CDF come from inverting the characteristic function ``sech(t)**n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy.optimize import brentq

from .core import HALF_PI, HSDistribution, _out, _real_input, sech
from .quadrature import panel_integrals, panel_nodes, refine_edges
from .rng import RngStream

__all__ = [
    "HSSumDistribution",
    "sum_pdf",
    "sum_cdf",
    "sum_quantile",
    "sum_sample",
    "cf_inversion_pdf",
    "cf_inversion_cdf",
]

_LOG2 = math.log(2.0)
_GL_ORDER = 16
# beyond this many standard units every n<=2 tail is below the double range
_TAIL_CLIP = 600.0
_SERIES_CUTOFF = 1e-4


def _log_sech_pow(t, n):
    # n * log(sech t) for t >= 0, stable for large t
    return n * (_LOG2 - t - np.log1p(np.exp(-2.0 * t)))


def _cf_cutoff(n: int) -> float:
    # sech(T)**n < 1e-18 since sech(T) < 2 e^-T
    return (18.0 * math.log(10.0) + n * _LOG2) / n


def _x_over_sinh_x(a):
    a = np.abs(a)
    small = a < _SERIES_CUTOFF
    safe = np.where(small, 1.0, a)
    direct = 2.0 * safe * np.exp(-safe) / -np.expm1(-2.0 * safe)
    a2 = a * a
    series = 1.0 - a2 / 6.0 + 7.0 * a2 * a2 / 360.0
    return np.where(small, series, direct)


def _std_pdf_closed(n: int, u):
    if n == 1:
        return 0.5 * sech(HALF_PI * u)
    if n == 2:
        return _x_over_sinh_x(HALF_PI * u) / math.pi
    raise ValueError("closed form only for n in {1, 2}")


def _cf_panels(u: float, n: int):
    top = _cf_cutoff(n)
    width = 0.5 if u == 0 else min(0.5, math.pi / abs(u))
    edges = np.linspace(0.0, top, int(math.ceil(top / width)) + 1)
    return panel_nodes(edges, _GL_ORDER)


def _std_cf_pdf(n: int, u):
    out = np.empty(np.shape(u))
    flat = np.ravel(u)
    res = out.reshape(-1)
    for i, ui in enumerate(flat):
        t, w = _cf_panels(float(ui), n)
        res[i] = (np.cos(t * ui) * np.exp(_log_sech_pow(t, n)) * w).sum() / math.pi
    return out


def _std_cf_cdf(n: int, u):
    out = np.empty(np.shape(u))
    flat = np.ravel(u)
    res = out.reshape(-1)
    for i, ui in enumerate(flat):
        if ui == 0:
            res[i] = 0.5
            continue
        t, w = _cf_panels(float(ui), n)
        res[i] = 0.5 + (np.sin(t * ui) / t * np.exp(_log_sech_pow(t, n)) * w).sum() / math.pi
    return out


def cf_inversion_pdf(n: int, scale: float, x):
    """Density of ``scale * sum of n HS`` by cosine inversion of ``sech(t)**n``.

    The integral is truncated where ``sech(T)**n < 1e-18`` and evaluated with
    16-point Gauss-Legendre panels no wider than half an oscillation period.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not scale > 0:
        raise ValueError("scale must be > 0")
    x_arr = _real_input(x)
    return _out(_std_cf_pdf(n, x_arr / scale) / scale, x)


def cf_inversion_cdf(n: int, scale: float, x):
    """CDF via ``1/2 + (1/pi) int_0^inf sin(t x/scale)/t sech(t)**n dt``."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not scale > 0:
        raise ValueError("scale must be > 0")
    x_arr = _real_input(x)
    return _out(_std_cf_cdf(n, x_arr / scale), x)


def _upper_tail_closed(n: int, u_abs: np.ndarray) -> np.ndarray:
    """``P(U > u)`` for ``u >= 0`` by quadrature of the closed-form density."""
    u_abs = np.minimum(u_abs, _TAIL_CLIP)
    far = float(u_abs.max(initial=0.0)) + 40.0
    edges = refine_edges(np.concatenate([u_abs.ravel(), [0.0, far]]), 0.5)
    seg = panel_integrals(lambda t: _std_pdf_closed(n, t), edges, _GL_ORDER)
    tail = np.append(np.cumsum(seg[::-1])[::-1], 0.0)
    tail = tail[np.searchsorted(edges, u_abs)]
    return np.where(u_abs >= _TAIL_CLIP, 0.0, tail)


@dataclass(frozen=True)
class HSSumDistribution:
    """Law of ``scale * (Y_1 + ... + Y_n)``; mean 0, variance ``n * scale**2``."""

    n: int = 2
    scale: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be > 0, got {self.scale}")

    @property
    def mean(self) -> float:
        return 0.0

    @property
    def variance(self) -> float:
        return self.n * self.scale**2

    def as_hs(self) -> HSDistribution:
        if self.n != 1:
            raise ValueError("only n = 1 is an HS law")
        return HSDistribution(0.0, self.scale)

    def pdf(self, x):
        u = _real_input(x) / self.scale
        if self.n <= 2:
            val = _std_pdf_closed(self.n, u)
        else:
            val = _std_cf_pdf(self.n, u)
        return _out(val / self.scale, x)

    def _upper(self, u_abs):
        if self.n == 1:
            e = np.exp(-HALF_PI * u_abs)
            return (2.0 / math.pi) * np.arctan(e)
        if self.n == 2:
            return _upper_tail_closed(2, u_abs)
        return 1.0 - _std_cf_cdf(self.n, u_abs)

    def cdf(self, x):
        u = _real_input(x) / self.scale
        upper = self._upper(np.abs(u))
        val = np.where(u < 0, upper, 1.0 - upper)
        return _out(np.where(u == 0, 0.5, val), x)

    def sf(self, x):
        u = _real_input(x) / self.scale
        upper = self._upper(np.abs(u))
        val = np.where(u > 0, upper, 1.0 - upper)
        return _out(np.where(u == 0, 0.5, val), x)

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        if np.any(~((p_arr > 0) & (p_arr < 1))):
            raise ValueError("p must lie in (0, 1)")
        if self.n == 1:
            return self.as_hs().quantile(p)
        vals = np.array([self._quantile1(float(pi)) for pi in p_arr.ravel()])
        return _out(vals.reshape(p_arr.shape), p)

    def _quantile1(self, p: float) -> float:
        if p == 0.5:
            return 0.0
        z = abs(NormalDist().inv_cdf(p))
        half = z * math.sqrt(self.n) * self.scale + 10.0 * self.scale
        lo, hi = -half, half
        while self.cdf(lo) > p:
            lo *= 2.0
        while self.cdf(hi) < p:
            hi *= 2.0
        return brentq(lambda x: self.cdf(x) - p, lo, hi, xtol=1e-12 * self.scale)

    def cf(self, t):
        t = _real_input(t)
        val = sech(self.scale * t) ** self.n
        return complex(val) if np.ndim(t) == 0 else val.astype(complex)

    def sample(self, rng: RngStream, m: int):
        return sum_sample(self, rng, m)


def sum_pdf(d: HSSumDistribution, x):
    return d.pdf(x)


def sum_cdf(d: HSSumDistribution, x):
    return d.cdf(x)


def sum_quantile(d: HSSumDistribution, p):
    return d.quantile(p)


def sum_sample(d: HSSumDistribution, rng: RngStream, m: int):
    """``m`` draws, each the scaled sum of ``n`` HS draws from ``rng``."""
    from .core import hs_sample
    from .harness import SampleBatch

    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    parts = hs_sample(HSDistribution(0.0, 1.0), rng, d.n * m)
    total = d.scale * parts.values.reshape(d.n, m).sum(axis=0)
    return SampleBatch(total, rng.seed, rng.stream_id, parts.redraw_count, f"hs-sum-{d.n}")
