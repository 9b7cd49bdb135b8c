"""The hyperbolic-secant location-scale family.

``HSDistribution(location, scale)`` is the law of ``location + scale * Y``
where ``Y`` has density ``1 / (exp(pi*y/2) + exp(-pi*y/2))``.  ``Y`` has
mean 0 and variance 1, so ``scale`` is the standard deviation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream, standard_cauchy_draw

__all__ = [
    "HSDistribution",
    "STANDARD_HS",
    "hs_pdf",
    "hs_cdf",
    "hs_quantile",
    "hs_sample",
    "hs_mgf",
    "hs_cf",
    "sech",
    "comparison_pdf",
]

HALF_PI = 0.5 * math.pi
TWO_OVER_PI = 2.0 / math.pi
LOGISTIC_SCALE = math.sqrt(3.0) / math.pi


def _real_input(x, name="input"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite {name}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def sech(a):
    """``1/cosh(a)`` without overflow: ``2 e^-|a| / (1 + e^-2|a|)``."""
    e = np.exp(-np.abs(np.asarray(a, dtype=float)))
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class HSDistribution:
    """Location-scale hyperbolic-secant law (``scale`` is the standard deviation)."""

    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.location) and math.isfinite(self.scale)):
            raise ValueError("location and scale must be finite")
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")

    @property
    def mean(self) -> float:
        return self.location

    @property
    def variance(self) -> float:
        return self.scale**2

    def _standardize(self, y):
        # argument of sech, in units where the standard density is sech(a)/2
        return HALF_PI * (_real_input(y) - self.location) / self.scale

    def pdf(self, y):
        a = self._standardize(y)
        return _out(sech(a) / (2.0 * self.scale), y)

    def cdf(self, y):
        a = self._standardize(y)
        # lower tail: (2/pi) atan(e^a); upper tail via the complement
        # 1 - (2/pi) atan(e^-a) so both tails keep absolute accuracy
        e = np.exp(-np.abs(a))
        tail = TWO_OVER_PI * np.arctan(e)
        return _out(np.where(a <= 0, tail, 1.0 - tail), y)

    def sf(self, y):
        a = self._standardize(y)
        e = np.exp(-np.abs(a))
        tail = TWO_OVER_PI * np.arctan(e)
        return _out(np.where(a >= 0, tail, 1.0 - tail), y)

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        if np.any(~((p_arr > 0) & (p_arr < 1))):
            raise ValueError("p must lie in (0, 1)")
        # q(p) = -q(1-p); evaluate on the smaller tail where 1-p is exact
        lo = np.minimum(p_arr, 1.0 - p_arr)
        z = TWO_OVER_PI * np.log(np.tan(HALF_PI * lo))
        z = np.where(p_arr > 0.5, -z, z)
        z = np.where(p_arr == 0.5, 0.0, z)
        return _out(self.location + self.scale * z, p)

    def mgf(self, t):
        st = self.scale * _real_input(t)
        if np.any(np.abs(st) >= HALF_PI):
            raise ValueError("MGF diverges for |scale*t| >= pi/2")
        return _out(np.exp(self.location * _real_input(t)) / np.cos(st), t)

    def cf(self, t):
        t = _real_input(t)
        val = np.exp(1j * self.location * t) * sech(self.scale * t)
        return complex(val) if np.ndim(t) == 0 else val

    def sample(self, rng: RngStream, n: int, cauchy: str = "inverse"):
        return hs_sample(self, rng, n, cauchy=cauchy)


STANDARD_HS = HSDistribution(0.0, 1.0)


def hs_pdf(d: HSDistribution, y):
    return d.pdf(y)


def hs_cdf(d: HSDistribution, y):
    return d.cdf(y)


def hs_quantile(d: HSDistribution, p):
    return d.quantile(p)


def hs_mgf(d: HSDistribution, t):
    return d.mgf(t)


def hs_cf(d: HSDistribution, t):
    """Characteristic function ``exp(i*location*t) * sech(scale*t)``.

    Unlike the MGF this is defined for every real ``t``.
    """
    return d.cf(t)


def hs_sample(d: HSDistribution, rng: RngStream, n: int, cauchy: str = "inverse"):
    """Draw ``n`` variates as ``location + scale * (2/pi) log|C|``.

    ``C`` is standard Cauchy, generated by ``cauchy`` (``"inverse"`` or
    ``"ratio"``, see :func:`standard_cauchy_draw`).  An exact ``C == 0`` is
    redrawn.
    """
    from .harness import SampleBatch

    c, redraws = standard_cauchy_draw(rng, n, method=cauchy)
    for _ in range(64):
        bad = c == 0.0
        k = int(bad.sum())
        if not k:
            break
        redraws += k
        c[bad], extra = standard_cauchy_draw(rng, k, method=cauchy)
        redraws += extra
    y = d.location + d.scale * (TWO_OVER_PI * np.log(np.abs(c)))
    return SampleBatch(y, rng.seed, rng.stream_id, redraws, f"hs-{cauchy}")


def comparison_pdf(family: str, y):
    """Unit-variance, zero-mean densities: ``"hs"``, ``"normal"`` or ``"logistic"``."""
    y_arr = _real_input(y)
    family = family.lower()
    if family == "hs":
        val = 0.5 * sech(HALF_PI * y_arr)
    elif family == "normal":
        val = np.exp(-0.5 * y_arr * y_arr) / math.sqrt(2.0 * math.pi)
    elif family == "logistic":
        # e^{-y/s} / (s (1 + e^{-y/s})^2) == sech^2(y/(2s)) / (4s)
        val = sech(y_arr / (2.0 * LOGISTIC_SCALE)) ** 2 / (4.0 * LOGISTIC_SCALE)
    else:
        raise ValueError(f"unknown family {family!r}")
    return _out(val, y)
