"""Hyperbolic-secant distributions, sums of HS variables, and three settings where they arise."""
from .core import (
    HSDistribution,
    STANDARD_HS,
    comparison_pdf,
    hs_cdf,
    hs_cf,
    hs_mgf,
    hs_pdf,
    hs_quantile,
    hs_sample,
)
from .harness import (
    GofReport,
    SampleBatch,
    ecdf,
    histogram,
    ks_one_sample,
    ks_two_sample,
    qq_points,
    sample_moments,
)
from .occurrences import (
    ContingencyScheme,
    IVScenario,
    TwinModel,
    icc,
    iv_log_gap_target,
    iv_simulate,
    jeffreys_binomial_draw,
    jeffreys_multinomial_draw,
    log_odds_ratio,
    marginal_prior_check,
    twin_simulate,
    twin_target,
)
from .rng import RngStream, standard_cauchy_draw
from .sums import (
    HSSumDistribution,
    cf_inversion_pdf,
    sum_cdf,
    sum_pdf,
    sum_quantile,
    sum_sample,
)

__version__ = "0.1.0"
