import math

import numpy as np
import pytest
from scipy.integrate import quad

from hsecant.core import HSDistribution, hs_sample, sech
from hsecant.harness import ks_two_sample, sample_moments
from hsecant.rng import RngStream
from hsecant.sums import (
    HSSumDistribution,
    cf_inversion_cdf,
    cf_inversion_pdf,
    sum_cdf,
    sum_pdf,
    sum_quantile,
    sum_sample,
)

# mpmath oracles (40 digits); the first also by direct convolution
W_AT_2 = 0.08621603193593062024
W_AT_0 = 1 / math.pi**2
F3_AT_1 = 0.19926840766919334
F3_AT_25 = 0.07139519873159443
CDF3_AT_1 = 0.73211564184917486

JEFF = HSSumDistribution(2, math.pi)


def three_sum_pdf(x):
    # convolution of three standard HS densities in closed form
    return (1 + x * x) * sech(math.pi * x / 2) / 4


def test_two_sum_examples():
    assert sum_pdf(JEFF, 0.0) == pytest.approx(W_AT_0, rel=1e-14)
    assert sum_pdf(JEFF, 2.0) == pytest.approx(W_AT_2, rel=1e-13)
    assert sum_cdf(JEFF, 0.0) == 0.5


def test_two_sum_matches_convolution():
    hs = HSDistribution(0.0, math.pi)
    for w in (0.0, 2.0, -7.5, 25.0):
        conv, _ = quad(lambda y: hs.pdf(y) * hs.pdf(w - y), -200, 200, points=[0.0, w],
                       epsabs=1e-15, limit=400)
        assert sum_pdf(JEFF, w) == pytest.approx(conv, rel=1e-9)


def test_three_sum_examples():
    d = HSSumDistribution(3, 1.0)
    assert d.pdf(1.0) == pytest.approx(F3_AT_1, rel=1e-10)
    assert d.pdf(2.5) == pytest.approx(F3_AT_25, rel=1e-10)
    assert d.cdf(1.0) == pytest.approx(CDF3_AT_1, abs=1e-10)
    x = np.linspace(-15, 15, 61)
    np.testing.assert_allclose(d.pdf(x), three_sum_pdf(x), rtol=1e-8, atol=1e-15)


@pytest.mark.parametrize("n,scale", [(1, 1.0), (2, 1.0), (2, math.pi), (1, 0.3)])
def test_closed_form_vs_inversion(n, scale):
    d = HSSumDistribution(n, scale)
    x = np.arange(-20.0, 21.0) * scale
    assert np.max(np.abs(d.pdf(x) - cf_inversion_pdf(n, scale, x))) < 1e-8


def test_cdf_inversion_matches_closed_form_for_two():
    x = np.linspace(-12, 12, 25)
    np.testing.assert_allclose(cf_inversion_cdf(2, 1.0, x), HSSumDistribution(2, 1.0).cdf(x), atol=1e-9)


def test_n_one_equals_hs():
    d = HSSumDistribution(1, 2.0)
    hs = HSDistribution(0.0, 2.0)
    x = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(d.pdf(x), hs.pdf(x), rtol=1e-14)
    np.testing.assert_allclose(d.cdf(x), hs.cdf(x), atol=1e-15)
    assert d.as_hs() == hs
    with pytest.raises(ValueError):
        JEFF.as_hs()


def test_continuity_at_origin():
    # the closed form switches to a series near zero
    for eps in (1e-8, 1e-5, 1e-3):
        assert sum_pdf(JEFF, eps) == pytest.approx(W_AT_0, rel=1e-5)
        assert sum_pdf(JEFF, -eps) == sum_pdf(JEFF, eps)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_variance_by_quadrature(n):
    d = HSSumDistribution(n, 1.0)
    total, _ = quad(d.pdf, -80, 80, points=[0.0], limit=400, epsabs=1e-12)
    var, _ = quad(lambda x: x * x * d.pdf(x), -80, 80, points=[0.0], limit=400, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-9)
    assert var == pytest.approx(n, rel=1e-7)
    assert d.variance == n


def test_four_sum_normalized():
    d = HSSumDistribution(4, 1.0)
    total, _ = quad(d.pdf, -80, 80, points=[0.0], limit=400, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_far_tails():
    assert sum_cdf(JEFF, 200.0) == pytest.approx(1.0, abs=1e-12)
    assert sum_cdf(JEFF, -200.0) == pytest.approx(0.0, abs=1e-12)
    assert JEFF.sf(60.0) == pytest.approx(1.0 - JEFF.cdf(60.0), abs=1e-13)


def test_cdf_monotone_and_symmetric():
    x = np.linspace(-60, 60, 481)
    f = JEFF.cdf(x)
    assert np.all(np.diff(f) >= 0)
    np.testing.assert_allclose(f + f[::-1], 1.0, atol=1e-14)


@pytest.mark.parametrize("d", [JEFF, HSSumDistribution(3, 1.0), HSSumDistribution(2, 0.01)])
def test_quantile_roundtrip(d):
    p = np.array([1e-6, 1e-3, 0.05, 0.3, 0.5, 0.8, 0.99, 1 - 1e-6])
    assert np.max(np.abs(d.cdf(d.quantile(p)) - p)) < 1e-9
    assert sum_quantile(d, 0.5) == 0.0


def test_quantile_domain():
    with pytest.raises(ValueError):
        JEFF.quantile(1.0)


def test_bad_parameters():
    for n, scale in ((0, 1.0), (2.5, 1.0), (2, 0.0), (2, -1.0)):
        with pytest.raises(ValueError):
            HSSumDistribution(n, scale)


def test_cf():
    assert JEFF.cf(0.0) == 1.0
    assert JEFF.cf(0.4) == pytest.approx(1 / math.cosh(0.4 * math.pi) ** 2, rel=1e-14)


def test_sample_variance():
    batch = sum_sample(JEFF, RngStream(21, 0), 10**5)
    _, var, _, var_se = sample_moments(batch)
    assert abs(var - 2 * math.pi**2) < 5 * var_se


def test_n_one_sample_matches_hs_sampler():
    a = sum_sample(HSSumDistribution(1, 1.0), RngStream(22, 0), 20000)
    b = hs_sample(HSDistribution(), RngStream(22, 1), 20000)
    assert ks_two_sample(a, b, 0.01).passed
