"""Fractional differencing: weight generation, truncation, and the three operators.

The forward operator (1 - B)^d interpolates between d=0 (identity) and d=1
(first difference), letting a transform remove just enough memory for
stationarity while keeping the rest. Weights follow the one-term recursion

    w_0 = 1,   w_j = w_{j-1} * (j - d - 1) / j

and an independent log-gamma route exists for cross-checking. Operators come
in expanding-window form (every output uses its full history), fixed-window
form (weights cut at a magnitude threshold, outputs only where the window is
complete), and an inverse for synthesizing long-memory processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import (
    EmptyInputError,
    InsufficientDataError,
    InvalidParameterError,
    PoleError,
)
from .series import TimeSeries

D_FORWARD_MIN = -1.0
D_FORWARD_MAX = 2.0


@dataclass(frozen=True)
class Truncation:
    """How a weight sequence was cut: by length, magnitude, or weight loss."""

    kind: str
    value: float

    @classmethod
    def by_length(cls, m: int) -> "Truncation":
        return cls("length", float(m))

    @classmethod
    def by_magnitude(cls, tau: float) -> "Truncation":
        return cls("magnitude", float(tau))

    @classmethod
    def by_weight_loss(cls, lambda_star: float) -> "Truncation":
        return cls("weight_loss", float(lambda_star))


@dataclass
class FdWeights:
    """A differencing-weight sequence together with how it was produced."""

    d: float
    weights: np.ndarray
    truncation: Truncation | None = None

    def __post_init__(self):
        if not np.isfinite(self.d):
            raise InvalidParameterError("d must be finite")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) == 0:
            raise InvalidParameterError("weights must be a non-empty 1-D array")
        if not np.all(np.isfinite(w)):
            raise InvalidParameterError("weights must be finite")
        if w[0] != 1.0:
            raise InvalidParameterError("w_0 must equal 1")
        w = w.copy()
        w.setflags(write=False)
        self.weights = w

    def __len__(self) -> int:
        return len(self.weights)


def _recursion(d: float, max_len: int) -> np.ndarray:
    w = np.empty(max_len)
    w[0] = 1.0
    for j in range(1, max_len):
        w[j] = w[j - 1] * (j - d - 1.0) / j
    return w


def fd_weights(d: float, max_len: int) -> FdWeights:
    """Generate the first `max_len` differencing weights for order d.

    Args:
        d: differencing order, any finite real.
        max_len: number of weights to produce, >= 1.

    Returns:
        FdWeights with w_0 = 1 and the recursion applied through
        w_{max_len-1}. Integer d reproduces the binomial expansion exactly
        (d=1 -> [1, -1, 0, ...]).
    """
    if not np.isfinite(d):
        raise InvalidParameterError("d must be finite")
    if max_len < 1:
        raise InvalidParameterError("max_len must be >= 1")
    return FdWeights(d=float(d), weights=_recursion(float(d), int(max_len)),
                     truncation=Truncation.by_length(int(max_len)))


def fd_weights_gamma(d: float, max_len: int) -> FdWeights:
    """Same weights via the gamma-function form; independent of the recursion.

    w_j = Gamma(j - d) / (Gamma(j + 1) * Gamma(-d)), evaluated in log space
    with explicit sign tracking so large j stays stable.

    Raises:
        PoleError: d is a non-negative integer (Gamma(-d) pole); use
            fd_weights, which handles integer d exactly.
    """
    if not np.isfinite(d):
        raise InvalidParameterError("d must be finite")
    if max_len < 1:
        raise InvalidParameterError("max_len must be >= 1")
    if d >= 0 and float(d).is_integer():
        raise PoleError(
            f"gamma route undefined at integer d={d}; use fd_weights instead"
        )
    j = np.arange(max_len, dtype=np.float64)
    log_w = gammaln(j - d) - gammaln(j + 1.0) - gammaln(-d)
    sign = gammasgn(j - d) * gammasgn(-d)
    w = sign * np.exp(log_w)
    w[0] = 1.0  # exact by definition; the log route returns it only approximately
    return FdWeights(d=float(d), weights=w,
                     truncation=Truncation.by_length(int(max_len)))


def truncate_by_magnitude(fdw: FdWeights, tau: float) -> FdWeights:
    """Drop trailing weights with |w_j| < tau. w_0 always survives."""
    if not (tau > 0):
        raise InvalidParameterError("tau must be > 0")
    mags = np.abs(fdw.weights)
    keep = np.flatnonzero(mags >= tau)
    last = int(keep[-1]) if len(keep) else 0
    return FdWeights(d=fdw.d, weights=fdw.weights[: last + 1],
                     truncation=Truncation.by_magnitude(tau))


def weight_loss(fdw: FdWeights, t: int, T: int) -> float:
    """Relative weight mass in the tail from position t, against the first T weights.

    Returns sum_{j=t..min(T, len-1)} |w_j| / sum_{i=0..T-1} |w_i|, capped at 1.
    This is the share of differencing mass an expanding-window output at
    position t-1 cannot see; it is 1 at t=0 (full mass), uses only the final
    weight at t=T-1, and decreases as t grows.
    """
    w = fdw.weights
    if not (0 <= t < T <= len(w)):
        raise InvalidParameterError(
            f"need 0 <= t < T <= len(weights); got t={t}, T={T}, len={len(w)}"
        )
    mags = np.abs(w)
    num = float(mags[t: min(T, len(w) - 1) + 1].sum())
    den = float(mags[:T].sum())
    return min(1.0, num / den)


def _check_forward_d(d: float) -> float:
    if not np.isfinite(d):
        raise InvalidParameterError("d must be finite")
    if not (D_FORWARD_MIN <= d <= D_FORWARD_MAX):
        raise InvalidParameterError(
            f"d={d} outside the supported forward range [{D_FORWARD_MIN}, {D_FORWARD_MAX}]"
        )
    return float(d)


def fracdiff_expanding(x: TimeSeries, d: float, lambda_star: float = 1.0) -> TimeSeries:
    """Expanding-window fractional difference.

    Every output uses all history available at its timestamp:
    y_t = sum_{j=0..t} w_j * x_{t-j}. Leading outputs whose unavailable
    weight mass exceeds `lambda_star` are dropped; lambda_star=1 keeps
    every point.

    Args:
        x: input series.
        d: differencing order in [-1, 2]. d=0 is the identity, d=1 yields
            first differences (first point kept as-is).
        lambda_star: tolerated relative weight loss, in (0, 1].
    """
    d = _check_forward_d(d)
    if not (0.0 < lambda_star <= 1.0):
        raise InvalidParameterError("lambda_star must be in (0, 1]")
    n = len(x)
    w = _recursion(d, n)
    y = np.convolve(x.values, w)[:n]
    # Missing mass for output k is the tail |w| beyond lag k, relative to total.
    tail = np.cumsum(np.abs(w)[::-1])[::-1]
    total = tail[0]
    missing = np.append(tail[1:], 0.0) / total
    kept = np.flatnonzero(missing <= lambda_star)
    if len(kept) == 0:
        raise EmptyInputError(
            f"lambda_star={lambda_star} drops every observation"
        )
    start = int(kept[0])
    return TimeSeries(x.dates[start:], y[start:], x.name)


def fixed_window_weights(d: float, tau: float, cap: int) -> FdWeights:
    """Weights for the fixed-window operator: generate until |w_j| < tau.

    Generation stops after `cap` weights even if the tail has not decayed
    below tau yet (callers compare the result length against their data).
    """
    d = _check_forward_d(d)
    if not (tau > 0):
        raise InvalidParameterError("tau must be > 0")
    if cap < 1:
        raise InvalidParameterError("cap must be >= 1")
    w = [1.0]
    j = 1
    while j < cap:
        nxt = w[-1] * (j - d - 1.0) / j
        if abs(nxt) < tau:
            break
        w.append(nxt)
        j += 1
    return FdWeights(d=d, weights=np.array(w), truncation=Truncation.by_magnitude(tau))


def fracdiff_fixed(x: TimeSeries, d: float, tau: float = 1e-4) -> TimeSeries:
    """Fixed-window fractional difference (stationary transform).

    Weights are cut where |w_j| first falls below tau; outputs exist only
    where the full window fits, so the first window-1 timestamps are
    dropped and every retained point is produced by the same weights.

    Raises:
        InsufficientDataError: the series is shorter than the window.
    """
    fdw = fixed_window_weights(d, tau, cap=len(x) + 1)
    m = len(fdw)
    if len(x) < m:
        raise InsufficientDataError(
            f"series of length {len(x)} is shorter than the weight window of {m}",
            required=m,
        )
    y = np.convolve(x.values, fdw.weights, mode="valid")
    return TimeSeries(x.dates[m - 1:], y, x.name)


def fracdiff_inverse(x: TimeSeries, d: float) -> TimeSeries:
    """Apply (1 - B)^(-d), the inverse of the expanding forward operator.

    Feeding white noise produces an ARFIMA(0, d, 0) sample path. Only
    d in (-1, 1) is accepted; at |d| -> 1 the inverse weights stop decaying.
    """
    if not np.isfinite(d):
        raise InvalidParameterError("d must be finite")
    if not (-1.0 < d < 1.0):
        raise InvalidParameterError(f"inverse requires d in (-1, 1); got d={d}")
    n = len(x)
    w = _recursion(-float(d), n)
    y = np.convolve(x.values, w)[:n]
    return TimeSeries(x.dates, y, x.name)
