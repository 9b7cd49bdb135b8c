"""Empirical-distribution diagnostics: ECDF, KS tests, moments, QQ and histograms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SampleBatch",
    "GofReport",
    "KS_CRITICAL",
    "ecdf",
    "ks_one_sample",
    "ks_two_sample",
    "sample_moments",
    "qq_points",
    "histogram",
]

# asymptotic two-sided Kolmogorov critical values c(alpha); threshold = c / sqrt(n)
KS_CRITICAL = {0.05: 1.36, 0.01: 1.63}


@dataclass(frozen=True)
class SampleBatch:
    """Immutable vector of finite draws plus the metadata that produced it."""

    values: np.ndarray
    seed: int = 0
    stream_id: int = 0
    redraw_count: int = 0
    generator_tag: str = ""
    _sorted: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def sorted(self) -> np.ndarray:
        if self._sorted is None:
            s = np.sort(self.values)
            s.flags.writeable = False
            object.__setattr__(self, "_sorted", s)
        return self._sorted

    def derive(self, values, tag: str | None = None) -> "SampleBatch":
        """A new batch with the same provenance and different values."""
        return SampleBatch(values, self.seed, self.stream_id, self.redraw_count, tag or self.generator_tag)


@dataclass(frozen=True)
class GofReport:
    ks_statistic: float
    n_effective: float
    threshold: float
    passed: bool
    mean: float
    variance: float
    mean_se: float

    def as_dict(self) -> dict:
        return {
            "n": self.n_effective,
            "ks_statistic": self.ks_statistic,
            "threshold": self.threshold,
            "passed": self.passed,
            "mean": self.mean,
            "variance": self.variance,
        }


def _as_batch(batch) -> SampleBatch:
    return batch if isinstance(batch, SampleBatch) else SampleBatch(batch)


def _critical(alpha) -> float:
    try:
        return KS_CRITICAL[alpha]
    except KeyError:
        raise ValueError(f"alpha must be one of {sorted(KS_CRITICAL)}") from None


def ecdf(batch, x):
    """Right-continuous empirical CDF ``#(values <= x) / n``."""
    batch = _as_batch(batch)
    if len(batch) == 0:
        raise ValueError("empty batch")
    res = np.searchsorted(batch.sorted, x, side="right") / len(batch)
    return float(res) if np.ndim(x) == 0 else res


def sample_moments(batch) -> tuple[float, float, float, float]:
    """``(mean, variance, mean_se, variance_se)`` with the unbiased variance."""
    batch = _as_batch(batch)
    n = len(batch)
    if n < 2:
        raise ValueError("need at least two values")
    v = batch.values
    mean = float(v.mean())
    dev = v - mean
    m2 = float(np.dot(dev, dev))
    var = m2 / (n - 1)
    m4 = float(np.mean(dev**4))
    var_se = math.sqrt(max(m4 - (m2 / n) ** 2, 0.0) / n)
    return mean, var, math.sqrt(var / n), var_se


def _report(d, n_eff, alpha, batch, threshold=None):
    mean, var, mean_se, _ = sample_moments(batch) if len(batch) >= 2 else (
        float(batch.values.mean()), 0.0, 0.0, 0.0)
    if threshold is None:
        threshold = _critical(alpha) / math.sqrt(n_eff)
    return GofReport(float(d), n_eff, float(threshold), bool(d < threshold), mean, var, mean_se)


def ks_statistic(batch, cdf) -> float:
    """Exact two-sided one-sample KS distance over the order statistics."""
    batch = _as_batch(batch)
    n = len(batch)
    if n == 0:
        raise ValueError("empty batch")
    f = np.asarray(cdf(batch.sorted), dtype=float)
    if f.shape != batch.sorted.shape:
        f = np.broadcast_to(f, batch.sorted.shape)
    if np.any(np.diff(f) < 0):
        raise ValueError("cdf is not monotone on the sample points")
    if np.any((f < 0) | (f > 1)):
        raise ValueError("cdf values outside [0, 1]")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_one_sample(batch, cdf, alpha: float = 0.01, threshold: float | None = None) -> GofReport:
    """One-sample KS test against a vectorised ``cdf``.

    ``threshold`` overrides the asymptotic ``c(alpha)/sqrt(n)`` critical value.
    """
    batch = _as_batch(batch)
    d = ks_statistic(batch, cdf)
    return _report(d, len(batch), alpha, batch, threshold)


def ks_two_sample(a, b, alpha: float = 0.01) -> GofReport:
    """Two-sample KS test; the moments in the report describe ``a``."""
    a, b = _as_batch(a), _as_batch(b)
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        raise ValueError("empty batch")
    pooled = np.concatenate([a.sorted, b.sorted])
    fa = np.searchsorted(a.sorted, pooled, side="right") / na
    fb = np.searchsorted(b.sorted, pooled, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    return _report(d, na * nb / (na + nb), alpha, a)


def qq_points(batch, quantile_fn, k: int) -> np.ndarray:
    """``(theoretical, empirical)`` pairs at plotting positions ``(i - 0.5)/k``."""
    batch = _as_batch(batch)
    n = len(batch)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError("k exceeds the sample size")
    p = (np.arange(1, k + 1) - 0.5) / k
    emp = batch.sorted[np.floor(p * n).astype(np.int64)]
    return np.column_stack([quantile_fn(p), emp])


def histogram(batch, lo: float, hi: float, bins: int):
    """Density histogram on ``[lo, hi]``.

    Returns ``(edges, densities, in_range_fraction)``; bar areas add up to the
    in-range fraction, so out-of-range draws are not renormalised away.
    """
    batch = _as_batch(batch)
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not lo < hi:
        raise ValueError("need lo < hi")
    counts, edges = np.histogram(batch.values, bins=bins, range=(lo, hi))
    n = len(batch)
    dens = counts / (n * np.diff(edges))
    return edges, dens, counts.sum() / n
