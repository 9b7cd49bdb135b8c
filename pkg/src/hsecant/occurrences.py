"""Three generative settings whose statistics follow HS laws.

* Twins: for a bivariate normal pair with correlation ``rho``, the Fisher
  z-transform of Thorndike's intraclass correlation is
  ``HS(arctanh(rho), pi/2)``.
* Jeffreys prior: under Dirichlet(1/2, 1/2, 1/2, 1/2) (or independent
  Beta(1/2, 1/2) rows) the 2x2 log odds ratio is ``pi * (Y_1 + Y_2)``.
* Invalid instrument: with ``T`` independent of ``(D, Y)``,
  ``log|beta_IV - beta_LS|`` tends to ``HS(log(eta), pi/2)``.

Cell counts ``n_ij``, potential outcomes and the complier effect are
background only; nothing here consumes them.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .core import HALF_PI, HSDistribution
from .harness import GofReport, SampleBatch, ks_one_sample
from .rng import RngStream
from .sums import HSSumDistribution

__all__ = [
    "TwinModel",
    "ContingencyScheme",
    "IVScenario",
    "IVResult",
    "MarginalPriorCheck",
    "icc",
    "twin_simulate",
    "twin_target",
    "dirichlet_jeffreys_cells",
    "jeffreys_multinomial_draw",
    "jeffreys_binomial_draw",
    "jeffreys_draw",
    "jeffreys_target",
    "marginal_prior_check",
    "log_odds_ratio",
    "iv_simulate",
    "iv_log_gap_target",
]

_MAX_ROUNDS = 64
_TWO32 = 1 << 32


# -- twins -----------------------------------------------------------------

@dataclass(frozen=True)
class TwinModel:
    mu: float = 0.0
    sigma: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie strictly inside (-1, 1), got {self.rho}")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")


def icc(x1, x2, mu):
    """Intraclass correlation ``2 a b / (a^2 + b^2)`` with ``a, b`` the deviations from ``mu``."""
    a = np.asarray(x1, dtype=float) - mu
    b = np.asarray(x2, dtype=float) - mu
    if np.any((a == 0) & (b == 0)):
        raise ValueError("undefined ICC: both members equal mu")
    r = 2.0 * a * b / (a * a + b * b)
    return float(r) if r.ndim == 0 else r


def _twin_draws(m: TwinModel, gen: np.random.Generator, k: int) -> np.ndarray:
    z = gen.standard_normal((2, k))
    x1 = m.mu + m.sigma * z[0]
    x2 = m.mu + m.sigma * (m.rho * z[0] + math.sqrt(1.0 - m.rho**2) * z[1])
    a, b = x1 - m.mu, x2 - m.mu
    with np.errstate(invalid="ignore", divide="ignore"):
        return 2.0 * a * b / (a * a + b * b)


def twin_simulate(m: TwinModel, rng: RngStream, reps: int) -> SampleBatch:
    """Draw ``reps`` values of ``arctanh(R)`` from the twin model.

    Pairs with ``|R| = 1`` or ``0/0`` at floating point are redrawn; the
    count is kept in ``redraw_count``.
    """
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    r = _twin_draws(m, rng.generator, reps)
    redraws = 0
    for _ in range(_MAX_ROUNDS):
        bad = ~(np.abs(r) < 1.0)
        k = int(bad.sum())
        if not k:
            break
        redraws += k
        r[bad] = _twin_draws(m, rng.generator, k)
    else:
        raise RuntimeError("twin redraw limit exceeded")
    return SampleBatch(np.arctanh(r), rng.seed, rng.stream_id, redraws, "twin")


def twin_target(m: TwinModel) -> HSDistribution:
    """``HS(arctanh(rho), pi/2)``, density ``sech(v - arctanh(rho)) / pi``."""
    return HSDistribution(math.atanh(m.rho), HALF_PI)


# -- Jeffreys prior for 2x2 tables -----------------------------------------

@dataclass(frozen=True)
class ContingencyScheme:
    """Sampling scheme for the table; row totals are metadata for the binomial scheme."""

    mode: str = "multinomial"
    n_row1: int | None = None
    n_row0: int | None = None

    def __post_init__(self):
        if self.mode not in ("multinomial", "binomial"):
            raise ValueError(f"mode must be 'multinomial' or 'binomial', got {self.mode!r}")
        for v in (self.n_row1, self.n_row0):
            if v is not None and v < 0:
                raise ValueError("row totals must be non-negative")


def log_odds_ratio(p11, p10, p01, p00):
    """``log(p11 * p00 / (p10 * p01))`` for strictly positive cells."""
    cells = [np.asarray(c, dtype=float) for c in (p11, p10, p01, p00)]
    if any(np.any(~(c > 0)) for c in cells):
        raise ValueError("cell probabilities must be strictly positive")
    w = np.log(cells[0]) + np.log(cells[3]) - np.log(cells[1]) - np.log(cells[2])
    return float(w) if w.ndim == 0 else w


def _half_gammas(rng: RngStream, reps: int) -> tuple[np.ndarray, int]:
    # Gamma(1/2, 1) as Z^2 / 2; columns are (11, 10, 01, 00)
    z, redraws = rng.nonzero_normal((reps, 4))
    return 0.5 * z * z, redraws


def dirichlet_jeffreys_cells(rng: RngStream, reps: int) -> tuple[np.ndarray, int]:
    """``(reps, 4)`` Dirichlet(1/2, ...) draws of ``(p11, p10, p01, p00)`` and the redraw count."""
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    x, redraws = _half_gammas(rng, reps)
    return x / x.sum(axis=1, keepdims=True), redraws


def jeffreys_multinomial_draw(rng: RngStream, reps: int) -> SampleBatch:
    p, redraws = dirichlet_jeffreys_cells(rng, reps)
    w = log_odds_ratio(p[:, 0], p[:, 1], p[:, 2], p[:, 3])
    return SampleBatch(w, rng.seed, rng.stream_id, redraws, "jeffreys-multinomial")


def jeffreys_binomial_draw(rng: RngStream, reps: int) -> SampleBatch:
    """Log odds ratio with independent Beta(1/2, 1/2) row probabilities ``q1, q0``."""
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    x, redraws = _half_gammas(rng, reps)
    row1 = x[:, 0] + x[:, 1]
    row0 = x[:, 2] + x[:, 3]
    q1, not_q1 = x[:, 0] / row1, x[:, 1] / row1
    q0, not_q0 = x[:, 2] / row0, x[:, 3] / row0
    w = np.log(q1) + np.log(not_q0) - np.log(q0) - np.log(not_q1)
    return SampleBatch(w, rng.seed, rng.stream_id, redraws, "jeffreys-binomial")


def jeffreys_draw(scheme: ContingencyScheme, rng: RngStream, reps: int) -> SampleBatch:
    if scheme.mode == "multinomial":
        return jeffreys_multinomial_draw(rng, reps)
    return jeffreys_binomial_draw(rng, reps)


def jeffreys_target() -> HSSumDistribution:
    """``pi * (Y_1 + Y_2)``: mean 0, variance ``2 pi^2``."""
    return HSSumDistribution(2, math.pi)


@dataclass(frozen=True)
class MarginalPriorCheck:
    row: GofReport
    column: GofReport

    @property
    def passed(self) -> bool:
        return self.row.passed and self.column.passed


def _uniform_cdf(x):
    return np.clip(x, 0.0, 1.0)


def marginal_prior_check(rng: RngStream, reps: int, alpha: float = 0.01) -> MarginalPriorCheck:
    """KS of the row margin ``p11 + p10`` and column margin ``p11 + p01`` against Uniform(0, 1)."""
    p, _ = dirichlet_jeffreys_cells(rng, reps)
    row = ks_one_sample(p[:, 0] + p[:, 1], _uniform_cdf, alpha)
    col = ks_one_sample(p[:, 0] + p[:, 2], _uniform_cdf, alpha)
    return MarginalPriorCheck(row, col)


# -- invalid instrument ----------------------------------------------------

@dataclass(frozen=True)
class IVScenario:
    """Invalid-instrument design.

    ``D ~ Bernoulli(p_d)``, ``Y = slope * D + eps`` with the slope and
    ``Var(eps)`` chosen so that ``sd(Y) = sigma_y`` and
    ``corr(Y, D) = rho_yd``; ``T ~ Bernoulli(p_treat)`` independently of
    both.  ``sigma_d`` is implied by ``p_d``; a supplied value must agree.
    """

    sigma_y: float = 1.0
    rho_yd: float = 0.0
    p_d: float = 0.5
    p_treat: float = 0.5
    n_units: int = 10_000
    sigma_d: float | None = None

    def __post_init__(self):
        if not self.sigma_y > 0:
            raise ValueError(f"sigma_y must be > 0, got {self.sigma_y}")
        if not -1.0 < self.rho_yd < 1.0:
            raise ValueError(f"rho_yd must lie strictly inside (-1, 1), got {self.rho_yd}")
        if not 0.0 < self.p_d < 1.0:
            raise ValueError(f"p_d must lie in (0, 1), got {self.p_d}")
        if not 0.0 < self.p_treat < 1.0:
            raise ValueError(f"p_treat must lie in (0, 1), got {self.p_treat}")
        if int(self.n_units) != self.n_units or self.n_units < 2:
            raise ValueError(f"n_units must be an integer >= 2, got {self.n_units}")
        implied = math.sqrt(self.p_d * (1.0 - self.p_d))
        if self.sigma_d is not None and not math.isclose(self.sigma_d, implied, rel_tol=1e-9):
            raise ValueError(
                f"sigma_d={self.sigma_d} is inconsistent with p_d={self.p_d} "
                f"(binary D has sd {implied:.15g})"
            )
        object.__setattr__(self, "sigma_d", implied)
        object.__setattr__(self, "n_units", int(self.n_units))

    @property
    def ls_limit(self) -> float:
        """Probability limit of the least-squares slope, ``rho * sigma_y / sigma_d``."""
        return self.rho_yd * self.sigma_y / self.sigma_d

    @property
    def eta(self) -> float:
        return self.sigma_y * math.sqrt(1.0 - self.rho_yd**2) / self.sigma_d

    @property
    def noise_sd(self) -> float:
        return self.sigma_y * math.sqrt(1.0 - self.rho_yd**2)

    def thresholds(self) -> tuple[int, int]:
        """32-bit Bernoulli thresholds for ``T`` and ``D``."""
        return round(self.p_treat * _TWO32), round(self.p_d * _TWO32)


@dataclass(frozen=True)
class IVResult:
    beta_iv: SampleBatch
    beta_ls: SampleBatch
    redraw_count: int

    def log_gap(self) -> SampleBatch:
        gap = np.abs(self.beta_iv.values - self.beta_ls.values)
        return self.beta_iv.derive(np.log(gap), "iv-log-gap")


def _iv_units(s: IVScenario, rng: RngStream, reps: int, threads: int, which: str | None):
    kern = backend.get(which)
    t_thr, d_thr = s.thresholds()
    beta_iv = np.empty(reps)
    beta_ls = np.empty(reps)
    redraws = np.zeros(reps, dtype=np.int64)

    def run(bounds):
        lo, hi = bounds
        return kern.iv_units(rng.seed, rng.stream_id, lo, hi, s.n_units, t_thr, d_thr,
                             s.ls_limit, s.noise_sd, beta_iv[lo:hi], beta_ls[lo:hi], redraws[lo:hi])

    threads = max(1, int(threads))
    n_chunks = 1 if threads == 1 else min(reps, 8 * threads)
    cuts = np.linspace(0, reps, n_chunks + 1).astype(np.int64)
    chunks = list(zip(cuts[:-1].tolist(), cuts[1:].tolist()))
    if threads == 1:
        failures = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(threads) as pool:
            failures = list(pool.map(run, chunks))
    if sum(failures):
        raise RuntimeError("IV replication kept degenerating; increase n_units")
    return beta_iv, beta_ls, int(redraws.sum())


def _iv_cells(s: IVScenario, rng: RngStream, reps: int):
    # exact reduction: cell counts of (T, D) are multinomial and the noise
    # sum in each cell is normal with variance count * noise_sd^2
    t_thr, d_thr = s.thresholds()
    pt, pd = t_thr / _TWO32, d_thr / _TWO32
    probs = [pt * pd, pt * (1 - pd), (1 - pt) * pd, (1 - pt) * (1 - pd)]
    gen = rng.generator
    n = s.n_units

    def draw(k):
        counts = gen.multinomial(n, probs, size=k)
        eps = gen.standard_normal((k, 4)) * np.sqrt(counts) * s.noise_sd
        return counts, eps

    def degenerate(c):
        n_t1 = c[:, 0] + c[:, 1]
        n_d1 = c[:, 0] + c[:, 2]
        n_t0 = n - n_t1
        n_d0 = n - n_d1
        if n > 2**31:
            # cross products would overflow int64
            c, n_t0, n_t1 = c.astype(object), n_t0.astype(object), n_t1.astype(object)
        tie = c[:, 0] * n_t0 == c[:, 2] * n_t1
        return (n_t1 == 0) | (n_t0 == 0) | (n_d1 == 0) | (n_d0 == 0) | tie.astype(bool)

    counts, eps = draw(reps)
    redraws = 0
    for _ in range(_MAX_ROUNDS):
        bad = degenerate(counts)
        k = int(bad.sum())
        if not k:
            break
        redraws += k
        counts[bad], eps[bad] = draw(k)
    else:
        raise RuntimeError("IV replication kept degenerating; increase n_units")

    c = counts.astype(float)
    ysum = eps + s.ls_limit * c * np.array([1.0, 0.0, 1.0, 0.0])
    n_t1 = c[:, 0] + c[:, 1]
    n_t0 = c[:, 2] + c[:, 3]
    n_d1 = c[:, 0] + c[:, 2]
    n_d0 = c[:, 1] + c[:, 3]
    num = (ysum[:, 0] + ysum[:, 1]) / n_t1 - (ysum[:, 2] + ysum[:, 3]) / n_t0
    den = c[:, 0] / n_t1 - c[:, 2] / n_t0
    beta_iv = num / den
    beta_ls = (ysum[:, 0] + ysum[:, 2]) / n_d1 - (ysum[:, 1] + ysum[:, 3]) / n_d0
    return beta_iv, beta_ls, redraws


def iv_simulate(s: IVScenario, rng: RngStream, reps: int, method: str = "units",
                threads: int = 1, kernel: str | None = None) -> IVResult:
    """Replicate the Wald IV estimator and the LS slope of ``Y`` on ``D``.

    ``method="units"`` generates every unit from the replication's child
    stream (compiled kernel when available); the result does not depend on
    ``threads``.  ``method="cells"`` draws the sufficient statistics
    directly, which is exact in law and cheap for very large ``n_units``.
    Degenerate replications (a constant ``T`` or ``D``, or equal treatment
    rates in the two arms) are redrawn and counted.
    """
    reps = int(reps)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if method == "units":
        biv, bls, redraws = _iv_units(s, rng, reps, threads, kernel)
    elif method == "cells":
        biv, bls, redraws = _iv_cells(s, rng, reps)
    else:
        raise ValueError(f"unknown method {method!r}")
    tag = f"iv-{method}"
    return IVResult(
        SampleBatch(biv, rng.seed, rng.stream_id, redraws, tag + "-beta-iv"),
        SampleBatch(bls, rng.seed, rng.stream_id, redraws, tag + "-beta-ls"),
        redraws,
    )


def iv_log_gap_target(s: IVScenario) -> HSDistribution:
    """Limit law ``HS(log(eta), pi/2)`` of ``log|beta_IV - beta_LS|``."""
    return HSDistribution(math.log(s.eta), HALF_PI)
