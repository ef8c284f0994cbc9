"""Distribution evaluation, sampling and serialization tests.

Frozen expected values were computed from closed forms with mpmath at 40+
digits; integration checks use scipy quadrature as an independent oracle.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from tempobench import distributions as dist

LN1 = dist.lognormal(3.85, 0.62)     # order-1 log-normal row
WB1 = dist.weibull(1.30, 65.97)      # order-1 weibull row
GM1 = dist.gamma(2.18, 0.04)         # order-1 gamma row
NM1 = dist.normal(60.04, 59.57)      # order-1 normal row
ALL_MODELS = [NM1, WB1, GM1, LN1]

LN1_MEDIAN = 46.993063231579285      # exp(3.85)
LN1_MEAN = 56.9514983803             # exp(3.85 + 0.62^2/2)


# --- pdf -------------------------------------------------------------------

def test_lognormal_pdf_at_median():
    # 1 / (x sigma sqrt(2 pi)) at the median, where the exponent term is 1.
    assert dist.pdf(LN1, LN1_MEDIAN) == pytest.approx(0.013692559001722, rel=1e-12)


def test_normal_peak_density():
    assert dist.pdf(NM1, 60.04) == pytest.approx(0.00669703341282, rel=1e-11)


def test_positive_families_vanish_at_nonpositive_x():
    for model in (WB1, GM1, LN1):
        assert dist.pdf(model, -1.0) == 0.0
        assert dist.pdf(model, 0.0) == 0.0
        assert dist.logpdf(model, -1.0) == -math.inf


def test_pdf_nonnegative_on_grid():
    for model in ALL_MODELS:
        xs = np.linspace(-10.0, 500.0, 301)
        assert np.all(dist.pdf_values(model, xs) >= 0.0)


def test_pdf_integrates_to_one():
    # Independent quadrature oracle over the support, cut where the upper
    # tail mass drops below 1e-10.
    for model in ALL_MODELS:
        hi = dist.quantile(model, 1.0 - 1e-10)
        lo = 0.0 if model.family is not dist.Family.NORMAL else dist.quantile(model, 1e-12)
        total, err = integrate.quad(lambda x: dist.pdf(model, x), lo, hi, limit=300)
        assert total == pytest.approx(1.0, abs=1e-6), model.family


# --- cdf -------------------------------------------------------------------

def test_lognormal_cdf_at_median_is_half():
    assert dist.cdf(LN1, math.exp(3.85)) == pytest.approx(0.5, abs=1e-12)


def test_weibull_cdf_at_scale():
    assert dist.cdf(WB1, 65.97) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)
    # Property holds for any shape.
    assert dist.cdf(dist.weibull(4.2, 10.0), 10.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)


def test_gamma_cdf_at_support_boundary():
    assert dist.cdf(GM1, 0.0) == 0.0
    assert dist.cdf(GM1, -3.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(range(4)),
    st.floats(min_value=-50.0, max_value=400.0),
    st.floats(min_value=0.01, max_value=80.0),
)
def test_cdf_monotone_nondecreasing(model_i, x, dx):
    model = ALL_MODELS[model_i]
    assert dist.cdf(model, x) <= dist.cdf(model, x + dx) + 1e-15


def test_cdf_bounds_on_grid():
    for model in ALL_MODELS:
        u = dist.cdf_values(model, np.linspace(-10, 2000, 500))
        assert np.all((u >= 0.0) & (u <= 1.0))


# --- quantile --------------------------------------------------------------

def test_lognormal_quantile_examples():
    assert dist.quantile(LN1, 0.5) == pytest.approx(LN1_MEDIAN, rel=1e-12)
    # z(0.75) = 0.67449 from the normal-quantile oracle.
    assert dist.quantile(LN1, 0.75) == pytest.approx(71.3918448562, rel=1e-9)


def test_weibull_quantile_inverts_scale_identity():
    assert dist.quantile(WB1, 1.0 - math.exp(-1.0)) == pytest.approx(65.97, rel=1e-12)


def test_quantile_cdf_round_trip_all_families():
    probs = np.arange(0.01, 1.0, 0.01)
    for model in ALL_MODELS:
        for p in probs:
            q = dist.quantile(model, p)
            assert abs(dist.cdf(model, q) - p) < 1e-9
            assert abs(dist.quantile(model, dist.cdf(model, q)) - q) <= 1e-9 * max(1.0, abs(q))


def test_quantile_domain_errors():
    for bad in (0.0, 1.0, -0.2, 1.7, math.nan):
        with pytest.raises(ValueError):
            dist.quantile(LN1, bad)


# --- sampling --------------------------------------------------------------

def test_sample_deterministic():
    for model in ALL_MODELS:
        a = dist.sample(model, seed=123, n=5)
        b = dist.sample(model, seed=123, n=5)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, dist.sample(model, seed=124, n=5).samples)


def test_lognormal_sample_mean():
    xs = dist.sample_values(LN1, seed=42, n=100_000)
    assert abs(xs.mean() - LN1_MEAN) / LN1_MEAN < 0.01


def test_weibull_sample_cdf_identity():
    xs = dist.sample_values(WB1, seed=7, n=100_000)
    frac = float(np.mean(xs <= 65.97))
    assert abs(frac - (1.0 - math.exp(-1.0))) < 0.005


def test_gamma_sampler_moments_including_boosted_shape():
    # Marsaglia-Tsang above and below shape 1.
    for shape, rate in [(2.18, 0.04), (0.5, 1.0), (11.88, 0.30)]:
        xs = dist.sample_values(dist.gamma(shape, rate), seed=3, n=200_000)
        assert xs.mean() == pytest.approx(shape / rate, rel=0.02)
        assert xs.var() == pytest.approx(shape / rate**2, rel=0.05)
        assert np.all(xs > 0.0)


def test_sample_requires_positive_n():
    with pytest.raises(ValueError):
        dist.sample(LN1, seed=0, n=0)


# --- log likelihood --------------------------------------------------------

def test_log_likelihood_single_point_at_median():
    got = dist.log_likelihood(LN1, [LN1_MEDIAN])
    assert got == pytest.approx(math.log(0.013692559001722), rel=1e-10)
    assert got == pytest.approx(-4.29090273226, abs=1e-9)


def test_log_likelihood_support_violation_is_minus_inf():
    assert dist.log_likelihood(GM1, [10.0, 0.0]) == -math.inf
    assert dist.log_likelihood(WB1, [-1.0]) == -math.inf


def test_log_likelihood_empty_rejected():
    with pytest.raises(ValueError):
        dist.log_likelihood(LN1, [])


def test_log_likelihood_equals_sum_of_logpdf():
    for model in ALL_MODELS:
        xs = dist.sample_values(model, seed=9, n=500)
        if model.family is not dist.Family.NORMAL:
            xs = np.abs(xs) + 1e-9
        total = dist.log_likelihood(model, xs)
        pointwise = sum(dist.logpdf(model, float(x)) for x in xs)
        assert abs(total - pointwise) < 1e-12 * len(xs) * max(1.0, abs(total))


# --- serialization ---------------------------------------------------------

def test_text_round_trip_and_field_names():
    text = dist.model_to_text(LN1)
    assert text == "family=lognormal mu=3.85 sigma=0.62"
    assert dist.model_from_text(text) == LN1
    assert dist.model_to_text(WB1).startswith("family=weibull shape=")
    assert dist.model_to_text(GM1) == "family=gamma shape=2.18 rate=0.04"


def test_json_round_trip():
    for model in ALL_MODELS:
        assert dist.model_from_dict(dist.model_to_dict(model)) == model
    obj = dist.model_to_dict(LN1)
    assert obj == {"family": "lognormal", "mu": 3.85, "sigma": 0.62}


def test_serialization_rejects_bad_records():
    with pytest.raises(ValueError):
        dist.model_from_text("family=lognormal mu=3.85")  # missing sigma
    with pytest.raises(ValueError):
        dist.model_from_text("family=cauchy loc=0 scale=1")
    with pytest.raises(ValueError):
        dist.model_from_dict({"family": "gamma", "shape": 2.0, "scale": 3.0})
    with pytest.raises(ValueError):
        dist.model_from_text("lognormal 3.85 0.62")


def test_param_validation():
    with pytest.raises(ValueError):
        dist.normal(0.0, 0.0)
    with pytest.raises(ValueError):
        dist.weibull(-1.0, 2.0)
    with pytest.raises(ValueError):
        dist.gamma(1.0, math.inf)
    with pytest.raises(ValueError):
        dist.DurationModel(dist.Family.NORMAL, dist.GammaParams(1.0, 1.0))


def test_models_hashable_and_immutable():
    assert len({LN1, WB1, GM1, NM1, dist.lognormal(3.85, 0.62)}) == 4
    with pytest.raises(AttributeError):
        LN1.family = dist.Family.NORMAL
