"""Diagnostics: log returns, ACF, ADF, KPSS, Hurst."""

import math
import warnings

import numpy as np
import pytest

from fdkit import (
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
    InvalidParameterError,
    SingularRegressionError,
    StatTestResult,
    TimeSeries,
    acf,
    adf_test,
    fracdiff_inverse,
    hurst_exponent,
    kpss_test,
    log_returns,
)
from fdkit.stattests import default_adf_max_lag, default_kpss_bandwidth


def walk(n, seed):
    return TimeSeries.from_values(np.cumsum(np.random.default_rng(seed).standard_normal(n)))


def noise(n, seed):
    return TimeSeries.from_values(np.random.default_rng(seed).standard_normal(n))


# --- log returns ---------------------------------------------------------


def test_log_returns_two_points():
    ts = TimeSeries.from_values([100.0, 105.0])
    out = log_returns(ts)
    assert len(out) == 1
    assert out.values[0] == pytest.approx(math.log(1.05), rel=1e-12)
    assert out.dates[0] == ts.dates[1]


def test_log_returns_rejects_nonpositive_and_names_timestamp():
    ts = TimeSeries.from_values([100.0, -5.0, 101.0], start="2021-06-01")
    with pytest.raises(DomainError) as exc:
        log_returns(ts)
    assert "2021-06-02" in str(exc.value)


def test_log_returns_needs_two_observations():
    with pytest.raises(InsufficientDataError):
        log_returns(TimeSeries.from_values([100.0]))


# --- ACF -----------------------------------------------------------------


def test_acf_lag0_is_one():
    r = acf(walk(200, seed=1), max_lag=10)
    assert r.values[0] == 1.0
    assert r.lags.tolist() == list(range(11))


def test_acf_alternating_series():
    x = TimeSeries.from_values([1.0, -1.0] * 50)
    r = acf(x, max_lag=2)
    assert r.values[1] == pytest.approx(-0.99, abs=0.02)
    assert r.values[2] == pytest.approx(0.98, abs=0.03)


def test_acf_white_noise_inside_band():
    r = acf(noise(2000, seed=2), max_lag=40)
    outside = np.sum(np.abs(r.values[1:]) > r.confidence_band)
    assert outside <= 6  # ~5% expected excursions
    assert r.confidence_band == pytest.approx(1.96 / math.sqrt(2000))


def test_acf_bounded_by_one():
    r = acf(walk(500, seed=3), max_lag=100)
    assert np.all(np.abs(r.values) <= 1.0 + 1e-12)


def test_acf_matches_statsmodels():
    from statsmodels.tsa.stattools import acf as sm_acf

    x = walk(300, seed=4)
    mine = acf(x, max_lag=20).values
    ref = sm_acf(x.values, nlags=20, adjusted=False, fft=False)
    np.testing.assert_allclose(mine, ref, atol=1e-12)


def test_acf_zero_variance_rejected():
    with pytest.raises(DegenerateInputError):
        acf(TimeSeries.from_values(np.full(50, 2.0)), max_lag=5)


def test_acf_max_lag_validation():
    x = noise(20, seed=5)
    for bad in (0, 20, 25, -1):
        with pytest.raises(InvalidParameterError):
            acf(x, max_lag=bad)


# --- ADF -----------------------------------------------------------------


def _ar1(n, phi, seed):
    e = np.random.default_rng(seed).standard_normal(n)
    x = np.zeros(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + e[t]
    return TimeSeries.from_values(x)


@pytest.mark.parametrize(
    "series",
    [noise(500, seed=10), walk(500, seed=11), _ar1(800, 0.7, 12), walk(2000, seed=13)],
    ids=["noise500", "walk500", "ar1", "walk2000"],
)
def test_adf_matches_statsmodels_autolag(series):
    from statsmodels.tsa.stattools import adfuller

    mine = adf_test(series)
    stat, p, lags, nobs, crit, _ = adfuller(series.values, regression="c", autolag="AIC")
    assert mine.statistic == pytest.approx(stat, abs=1e-8)
    assert mine.p_value == pytest.approx(p, abs=1e-8)
    assert mine.lags_used == lags
    assert mine.nobs == nobs
    for k in ("1%", "5%", "10%"):
        assert mine.critical_values[k] == pytest.approx(crit[k], abs=1e-10)


def test_adf_fixed_lag_matches_statsmodels():
    from statsmodels.tsa.stattools import adfuller

    x = walk(400, seed=14)
    mine = adf_test(x, max_lag=5)
    stat, p, lags, *_ = adfuller(x.values, regression="c", maxlag=5, autolag=None)
    assert mine.lags_used == 5 == lags
    assert mine.statistic == pytest.approx(stat, abs=1e-8)
    assert mine.p_value == pytest.approx(p, abs=1e-8)


def test_adf_location_invariance():
    x = walk(600, seed=15)
    shifted = x.with_values(x.values + 500.0)
    a, b = adf_test(x), adf_test(shifted)
    assert a.statistic == pytest.approx(b.statistic, abs=1e-7)
    assert a.lags_used == b.lags_used


def test_adf_rejects_on_white_noise():
    assert adf_test(noise(2000, seed=16)).p_value < 0.01


def test_adf_accepts_unit_root():
    assert adf_test(walk(2000, seed=17)).p_value > 0.10


def test_adf_asymptotic_critical_values():
    # Published large-sample values, good to +-0.01.
    from fdkit._mackinnon import adf_critical_values

    cv = adf_critical_values()
    assert cv["1%"] == pytest.approx(-3.436, abs=0.01)
    assert cv["5%"] == pytest.approx(-2.864, abs=0.01)
    assert cv["10%"] == pytest.approx(-2.568, abs=0.01)


def test_adf_pvalue_saturates():
    from fdkit._mackinnon import adf_pvalue

    assert adf_pvalue(-25.0) == 0.0
    assert adf_pvalue(5.0) == 1.0
    assert 0.0 < adf_pvalue(-2.86) < 0.06


def test_adf_constant_series_is_singular():
    with pytest.raises(SingularRegressionError):
        adf_test(TimeSeries.from_values(np.full(100, 7.0)), max_lag=0)


def test_adf_too_short_series():
    with pytest.raises(InsufficientDataError):
        adf_test(TimeSeries.from_values([1.0, 2.0, 1.5]), max_lag=5)


def test_adf_default_max_lag_formula():
    assert default_adf_max_lag(100) == 12
    assert default_adf_max_lag(2000) == 25
    assert default_adf_max_lag(2627) == 27


# --- KPSS ----------------------------------------------------------------


@pytest.mark.parametrize(
    "series",
    [noise(500, seed=20), walk(500, seed=21), noise(2000, seed=22), _ar1(600, 0.5, 23)],
    ids=["noise500", "walk500", "noise2000", "ar1"],
)
def test_kpss_matches_statsmodels(series):
    from statsmodels.tsa.stattools import kpss as sm_kpss

    bw = default_kpss_bandwidth(len(series))
    mine = kpss_test(series)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        stat, p, _, _ = sm_kpss(series.values, regression="c", nlags=bw)
    assert mine.statistic == pytest.approx(stat, abs=1e-10)
    assert mine.lags_used == bw
    assert mine.p_value == pytest.approx(min(0.10, max(0.01, p)), abs=1e-10)


def test_kpss_critical_values_table():
    cv = kpss_test(walk(300, seed=24)).critical_values
    assert cv["1%"] == 0.739
    assert cv["5%"] == 0.463
    assert cv["10%"] == 0.347
    assert cv["2.5%"] == 0.574


def test_kpss_pvalue_clamped():
    assert kpss_test(walk(1000, seed=25)).p_value == 0.01
    assert kpss_test(noise(1000, seed=26)).p_value >= 0.01
    assert kpss_test(noise(1000, seed=26)).p_value <= 0.10


def test_kpss_stat_small_on_noise_large_on_walk():
    assert kpss_test(noise(1500, seed=27)).statistic < 0.463
    assert kpss_test(walk(1500, seed=28)).statistic > 0.739


def test_kpss_default_bandwidth_formula():
    assert default_kpss_bandwidth(100) == 4
    assert default_kpss_bandwidth(2000) == 8
    assert default_kpss_bandwidth(2627) == 9


def test_kpss_constant_series_degenerate():
    with pytest.raises(DegenerateInputError):
        kpss_test(TimeSeries.from_values(np.full(60, 1.0)))


def test_kpss_bandwidth_validation():
    x = noise(50, seed=29)
    for bad in (-1, 50, 100):
        with pytest.raises(InvalidParameterError):
            kpss_test(x, bandwidth=bad)


# --- result container ----------------------------------------------------


def test_result_rejects_unknown_kind():
    with pytest.raises(InvalidParameterError):
        StatTestResult("XYZ", 0.0, 0.5, {"1%": -3.4, "5%": -2.9, "10%": -2.6}, 0, 100)


def test_result_rejects_bad_pvalue():
    with pytest.raises(InvalidParameterError):
        StatTestResult("ADF", 0.0, 1.5, {"1%": -3.4, "5%": -2.9, "10%": -2.6}, 0, 100)


def test_result_enforces_critical_value_order():
    with pytest.raises(InvalidParameterError):
        StatTestResult("ADF", 0.0, 0.5, {"1%": -2.6, "5%": -2.9, "10%": -3.4}, 0, 100)
    with pytest.raises(InvalidParameterError):
        StatTestResult("KPSS", 0.5, 0.05, {"1%": 0.3, "5%": 0.4, "10%": 0.7}, 4, 100)


# --- Hurst ---------------------------------------------------------------


def test_hurst_random_walk_near_half():
    h = hurst_exponent(walk(10_000, seed=30), max_lag=100)
    assert h == pytest.approx(0.5, abs=0.05)


def test_hurst_persistent_path_above_half():
    # cumulated long-memory innovations behave like an H = d + 0.5 path
    rng = np.random.default_rng(31)
    eps = TimeSeries.from_values(rng.standard_normal(5000))
    x = TimeSeries.from_values(np.cumsum(fracdiff_inverse(eps, 0.45).values))
    assert hurst_exponent(x, max_lag=50) > 0.75


def test_hurst_pure_trend_has_zero_dispersion():
    # increments of x_t = t are constant, the canonical zero-dispersion case
    x = TimeSeries.from_values(np.arange(500, dtype=float))
    with pytest.raises(DegenerateInputError):
        hurst_exponent(x, max_lag=20)


def test_hurst_antipersistent_series_below_half():
    rng = np.random.default_rng(32)
    eps = TimeSeries.from_values(rng.standard_normal(8000))
    x = fracdiff_inverse(eps, -0.3)  # negatively correlated increments
    assert hurst_exponent(x, max_lag=20) < 0.4


def test_hurst_affine_invariance():
    x = walk(3000, seed=33)
    h0 = hurst_exponent(x, max_lag=50)
    h1 = hurst_exponent(x.with_values(10.0 + 3.0 * x.values), max_lag=50)
    assert h0 == pytest.approx(h1, abs=1e-12)


def test_hurst_constant_series_degenerate():
    with pytest.raises(DegenerateInputError):
        hurst_exponent(TimeSeries.from_values(np.full(500, 3.0)), max_lag=10)


def test_hurst_length_and_lag_validation():
    with pytest.raises(InsufficientDataError):
        hurst_exponent(walk(100, seed=34), max_lag=50)
    with pytest.raises(InvalidParameterError):
        hurst_exponent(walk(100, seed=35), max_lag=2)
