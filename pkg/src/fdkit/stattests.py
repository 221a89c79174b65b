"""Stationarity and memory diagnostics.

All tests run the constant-only (level) variants, which is the right null
for demeaned daily price work:

* ``adf_test``: augmented Dickey-Fuller regression of the first difference
  on a constant, the lagged level, and lagged differences. Lag order is
  chosen by AIC over 0..floor(12*(T/100)^0.25); candidates are compared on
  the common maxlag-trimmed sample and the winner re-estimated on the
  longest sample it allows. P-values and finite-sample critical values come
  from the MacKinnon response surfaces.
* ``kpss_test``: stationarity-null counterpart, with a Bartlett-kernel
  long-run variance at bandwidth floor(4*(T/100)^0.25) and the standard
  interpolated p-value, clamped to [0.01, 0.10].
* ``acf``: autocorrelations with the biased (T-denominator) estimator and a
  +-1.96/sqrt(T) confidence band.
* ``hurst_exponent``: slope of log dispersion of tau-step increments
  against log tau.

Using ADF and KPSS together splits series into stationary (ADF rejects,
KPSS does not), unit root (the reverse), or ambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from . import _mackinnon
from .errors import (
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
    InvalidParameterError,
    SingularRegressionError,
)
from .series import TimeSeries

KPSS_CRITICAL_VALUES = {"1%": 0.739, "2.5%": 0.574, "5%": 0.463, "10%": 0.347}
# Interpolation grid: statistic values at the 10%, 5%, 2.5%, 1% p-levels.
_KPSS_STAT_GRID = np.array([0.347, 0.463, 0.574, 0.739])
_KPSS_P_GRID = np.array([0.10, 0.05, 0.025, 0.01])


@dataclass
class StatTestResult:
    """Outcome of a unit-root or stationarity test."""

    kind: str
    statistic: float
    p_value: float
    critical_values: dict[str, float]
    lags_used: int
    nobs: int

    def __post_init__(self):
        if self.kind not in ("ADF", "KPSS"):
            raise InvalidParameterError(f"unknown test kind {self.kind!r}")
        if not (0.0 <= self.p_value <= 1.0):
            raise InvalidParameterError(f"p-value {self.p_value} outside [0, 1]")
        ordered = [self.critical_values[k] for k in ("1%", "5%", "10%")]
        ascending = ordered[0] < ordered[1] < ordered[2]
        if self.kind == "ADF" and not ascending:
            raise InvalidParameterError("ADF critical values must rise with the level")
        if self.kind == "KPSS" and ascending:
            raise InvalidParameterError("KPSS critical values must fall with the level")


@dataclass
class AcfResult:
    """Autocorrelations by lag with a white-noise confidence band."""

    lags: np.ndarray
    values: np.ndarray
    confidence_band: float
    nobs: int


def log_returns(x: TimeSeries) -> TimeSeries:
    """Log returns ln(x_t / x_{t-1}); output starts at the second timestamp."""
    if len(x) < 2:
        raise InsufficientDataError("log returns need at least 2 observations", required=2)
    nonpos = np.flatnonzero(x.values <= 0)
    if len(nonpos):
        t = x.dates[int(nonpos[0])]
        raise DomainError(f"log returns need positive values; found {x.values[int(nonpos[0])]} at {t}")
    vals = np.diff(np.log(x.values))
    return TimeSeries(x.dates[1:], vals, x.name)


def acf(x: TimeSeries, max_lag: int) -> AcfResult:
    """Autocorrelation function with the biased T-denominator estimator.

    r_k = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)^2, the
    convention under which r_0 = 1 and the sequence is positive
    semidefinite. The confidence band is the white-noise +-1.96/sqrt(T).
    """
    n = len(x)
    if not (1 <= max_lag < n):
        raise InvalidParameterError(f"max_lag must be in [1, {n - 1}]; got {max_lag}")
    centered = x.values - x.values.mean()
    denom = float(centered @ centered)
    if denom == 0.0:
        raise DegenerateInputError("series has zero variance; ACF undefined")
    values = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        values[k] = float(centered[: n - k] @ centered[k:]) / denom
    return AcfResult(
        lags=np.arange(max_lag + 1),
        values=values,
        confidence_band=1.96 / math.sqrt(n),
        nobs=n,
    )


def _ols(y: np.ndarray, X: np.ndarray):
    """Least squares via QR; returns (beta, stderr, ssr)."""
    n, k = X.shape
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if np.any(diag < 1e-12 * max(1.0, diag.max())):
        raise SingularRegressionError("design matrix is collinear")
    beta = solve_triangular(r, q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    if n > k:
        sigma2 = ssr / (n - k)
        rinv = solve_triangular(r, np.eye(k))
        stderr = np.sqrt(sigma2 * np.sum(rinv**2, axis=1))
    else:
        stderr = np.full(k, np.nan)
    return beta, stderr, ssr


def _adf_design(values: np.ndarray, p: int):
    """Regression pieces for lag order p: target, constant, level, diff lags."""
    dv = np.diff(values)
    n = len(dv)
    y = dv[p:]
    cols = [np.ones(n - p), values[p:-1]]
    for i in range(1, p + 1):
        cols.append(dv[p - i: n - i])
    return y, np.column_stack(cols)


def default_adf_max_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def adf_test(x: TimeSeries, max_lag: int | None = None) -> StatTestResult:
    """Augmented Dickey-Fuller test, constant-only regression.

    Args:
        x: series under the unit-root null.
        max_lag: largest augmentation lag to consider. None selects by AIC
            over 0..floor(12*(T/100)^0.25).

    Returns:
        StatTestResult whose statistic is the t-ratio on the lagged level;
        large negative values reject the unit root.
    """
    values = x.values
    n = len(values)
    if max_lag is None:
        auto = True
        max_lag = min(default_adf_max_lag(n), (n - 1) // 2 - 2)
    else:
        auto = False
        if max_lag < 0:
            raise InvalidParameterError("max_lag must be >= 0")
    # need nobs = n - 1 - max_lag rows against max_lag + 2 regressors plus slack
    if max_lag < 0 or n - 1 - max_lag < max_lag + 3:
        raise InsufficientDataError(
            f"series of length {n} too short for max_lag={max_lag}",
            required=2 * max(max_lag, 0) + 4,
        )

    if auto and max_lag > 0:
        # Candidates share the maxlag-trimmed sample so AICs are comparable.
        y, X = _adf_design(values, max_lag)
        nobs = len(y)
        best_p, best_aic = 0, np.inf
        for p in range(0, max_lag + 1):
            Xp = X[:, : 2 + p]
            _, _, ssr = _ols(y, Xp)
            aic = nobs * math.log(ssr / nobs) + 2 * (2 + p) if ssr > 0 else -np.inf
            if aic < best_aic:
                best_aic, best_p = aic, p
        p = best_p
    else:
        p = max_lag

    y, X = _adf_design(values, p)
    beta, stderr, _ = _ols(y, X)
    stat = float(beta[1] / stderr[1])
    nobs = len(y)
    return StatTestResult(
        kind="ADF",
        statistic=stat,
        p_value=_mackinnon.adf_pvalue(stat),
        critical_values=_mackinnon.adf_critical_values(nobs),
        lags_used=p,
        nobs=nobs,
    )


def default_kpss_bandwidth(n: int) -> int:
    return int(math.floor(4.0 * (n / 100.0) ** 0.25))


def kpss_test(x: TimeSeries, bandwidth: int | None = None) -> StatTestResult:
    """KPSS level-stationarity test.

    The statistic is sum_t S_t^2 / (T^2 * lrv) with S_t the cumulated
    demeaned series and lrv the Bartlett long-run variance at the given
    bandwidth (default floor(4*(T/100)^0.25)). Large values reject
    stationarity. The p-value interpolates the standard table and is
    clamped to [0.01, 0.10].
    """
    values = x.values
    n = len(values)
    if bandwidth is None:
        bandwidth = default_kpss_bandwidth(n)
    if not (0 <= bandwidth < n):
        raise InvalidParameterError(f"bandwidth must be in [0, {n - 1}]; got {bandwidth}")
    if n < 2:
        raise InsufficientDataError("KPSS needs at least 2 observations", required=2)
    e = values - values.mean()
    gamma0 = float(e @ e) / n
    if gamma0 == 0.0:
        raise DegenerateInputError("series has zero variance; KPSS undefined")
    lrv = gamma0
    for h in range(1, bandwidth + 1):
        lrv += 2.0 * (1.0 - h / (bandwidth + 1.0)) * float(e[:-h] @ e[h:]) / n
    if lrv <= 0:
        raise DegenerateInputError("long-run variance is not positive")
    s = np.cumsum(e)
    stat = float(s @ s) / (n**2 * lrv)
    p = float(np.interp(stat, _KPSS_STAT_GRID, _KPSS_P_GRID))
    return StatTestResult(
        kind="KPSS",
        statistic=stat,
        p_value=p,
        critical_values=dict(KPSS_CRITICAL_VALUES),
        lags_used=bandwidth,
        nobs=n,
    )


def hurst_exponent(x: TimeSeries, max_lag: int = 100) -> float:
    """Hurst exponent from the dispersion of lagged increments.

    For each tau in 2..max_lag, compute the standard deviation of
    (x_{t+tau} - x_t); the exponent is the slope of log dispersion against
    log tau. Near 0.5 for a random walk, above for trending series, below
    for mean-reverting ones. The estimate is not clamped to [0, 1].
    """
    if max_lag < 3:
        raise InvalidParameterError("max_lag must be >= 3")
    n = len(x)
    if n <= 2 * max_lag:
        raise InsufficientDataError(
            f"length {n} too short for max_lag={max_lag}", required=2 * max_lag + 1
        )
    values = x.values
    lags = np.arange(2, max_lag + 1)
    dispersion = np.array([np.std(values[lag:] - values[:-lag]) for lag in lags])
    if np.any(dispersion == 0.0):
        raise DegenerateInputError("zero dispersion at some lag; Hurst undefined")
    slope = np.polyfit(np.log(lags), np.log(dispersion), 1)[0]
    return float(slope)
