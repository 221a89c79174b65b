"""Grid search for the smallest differencing order that reaches stationarity.

The trade-off: larger d makes the ADF statistic more negative (more
stationary) but costs correlation with the original series (less memory
kept). scan_d tabulates both along a d grid, select_optimal_d picks the
smallest passing d, and heatmap sweeps the threshold axis as well.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataError,
    DomainError,
    FdkitError,
    InvalidParameterError,
    NoStationaryDError,
)
from .fracdiff import fracdiff_fixed
from .series import TimeSeries
from .stattests import adf_test

THREADS_ENV_VAR = "FRACDIFF_THREADS"

DEFAULT_D_GRID = tuple(round(0.1 * k, 1) for k in range(11))  # 0.0 .. 1.0
DEFAULT_ALPHA = 0.05
# Heatmap axes: 10 thresholds x 13 d values = 130 combinations.
DEFAULT_HEATMAP_THRESHOLDS = (1e-3, 9e-4, 7e-4, 5e-4, 3e-4, 1e-4, 9e-5, 7e-5, 5e-5, 3e-5)
DEFAULT_HEATMAP_D_VALUES = tuple(round(0.8 - 0.05 * k, 2) for k in range(13))  # 0.8 .. 0.2


@dataclass
class DScanRow:
    """One grid point: stationarity evidence vs memory kept at order d."""

    d: float
    adf_stat: float
    adf_p: float
    correlation: float
    n_retained: int
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class HeatmapGrid:
    """ADF statistics over a threshold x d grid; NaN cells carry an error note."""

    thresholds: tuple[float, ...]
    d_values: tuple[float, ...]
    adf_stats: np.ndarray
    cell_errors: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        expected = (len(self.thresholds), len(self.d_values))
        if self.adf_stats.shape != expected:
            raise InvalidParameterError(
                f"stat matrix shape {self.adf_stats.shape} != axes {expected}"
            )


def _thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_cells(fn, items):
    """Ordered map, threaded only when FRACDIFF_THREADS asks for it."""
    cap = _thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(cap, len(items))) as pool:
        return list(pool.map(fn, items))


def _log_values(x: TimeSeries) -> TimeSeries:
    nonpos = np.flatnonzero(x.values <= 0)
    if len(nonpos):
        i = int(nonpos[0])
        raise DomainError(
            f"log scan needs positive values; found {x.values[i]} at {x.dates[i]}"
        )
    return x.with_values(np.log(x.values))


def _scan_one(base: TimeSeries, d: float, tau: float) -> DScanRow:
    try:
        fd = fracdiff_fixed(base, d, tau)
        result = adf_test(fd)
        overlap = base.values[len(base) - len(fd):]
        corr = float(np.corrcoef(fd.values, overlap)[0, 1])
        return DScanRow(
            d=d,
            adf_stat=result.statistic,
            adf_p=result.p_value,
            correlation=corr,
            n_retained=len(fd),
        )
    except FdkitError as exc:
        return DScanRow(
            d=d, adf_stat=math.nan, adf_p=math.nan, correlation=math.nan,
            n_retained=0, error=str(exc),
        )


def scan_d(
    x: TimeSeries,
    d_grid=DEFAULT_D_GRID,
    tau: float = 1e-4,
    use_log: bool = True,
) -> list[DScanRow]:
    """Tabulate ADF stationarity and correlation with the original per d.

    Each row applies the fixed-window transform at (d, tau), runs the ADF
    test on the result, and computes the Pearson correlation between the
    transformed series and the (optionally logged) original over the
    timestamps both share. Failures (e.g. a window longer than the series)
    mark their row rather than aborting the scan. Rows come back ordered by
    ascending d.
    """
    grid = sorted(float(d) for d in d_grid)
    if not grid:
        raise InvalidParameterError("d_grid must be non-empty")
    for d in grid:
        if not (0.0 <= d <= 2.0):
            raise InvalidParameterError(f"scan orders must lie in [0, 2]; got {d}")
    if not (tau > 0):
        raise InvalidParameterError("tau must be > 0")
    base = _log_values(x) if use_log else x
    return _map_cells(lambda d: _scan_one(base, d, tau), grid)


def select_optimal_d(rows: list[DScanRow], alpha: float = DEFAULT_ALPHA) -> float:
    """Smallest d whose ADF p-value beats alpha.

    Raises:
        NoStationaryDError: nothing passed; carries the closest row
            (lowest p-value) for diagnostics.
    """
    if not rows:
        raise InvalidParameterError("rows must be non-empty")
    if not (0.0 < alpha < 1.0):
        raise InvalidParameterError("alpha must be in (0, 1)")
    ds = [row.d for row in rows]
    if ds != sorted(ds) or len(set(ds)) != len(ds):
        raise InvalidParameterError("rows must be sorted by strictly ascending d")
    for row in rows:
        if not row.failed and row.adf_p < alpha:
            return row.d
    usable = [row for row in rows if not row.failed]
    best = min(usable, key=lambda row: row.adf_p) if usable else None
    raise NoStationaryDError(
        f"no scanned d reached ADF p < {alpha}"
        + (f"; closest was d={best.d} with p={best.adf_p:.4f}" if best else ""),
        best_row=best,
    )


def heatmap(
    x: TimeSeries,
    thresholds=DEFAULT_HEATMAP_THRESHOLDS,
    d_values=DEFAULT_HEATMAP_D_VALUES,
) -> HeatmapGrid:
    """ADF statistic for every (threshold, d) combination.

    Cells that cannot be computed (window exceeds the series, singular
    regression) hold NaN and an entry in cell_errors; the sweep never
    aborts.
    """
    thresholds = tuple(float(t) for t in thresholds)
    d_values = tuple(float(d) for d in d_values)
    if not thresholds or not d_values:
        raise InvalidParameterError("both heatmap axes must be non-empty")
    for t in thresholds:
        if not (t > 0):
            raise InvalidParameterError("thresholds must be > 0")
    for d in d_values:
        if not (0.0 <= d <= 2.0):
            raise InvalidParameterError(f"heatmap orders must lie in [0, 2]; got {d}")

    cells = [(i, j) for i in range(len(thresholds)) for j in range(len(d_values))]

    def run_cell(cell):
        i, j = cell
        try:
            fd = fracdiff_fixed(x, d_values[j], thresholds[i])
            return i, j, adf_test(fd).statistic, None
        except FdkitError as exc:
            return i, j, math.nan, str(exc)

    stats = np.full((len(thresholds), len(d_values)), math.nan)
    errors: dict[tuple[int, int], str] = {}
    for i, j, stat, err in _map_cells(run_cell, cells):
        stats[i, j] = stat
        if err is not None:
            errors[(i, j)] = err
    return HeatmapGrid(thresholds=thresholds, d_values=d_values,
                       adf_stats=stats, cell_errors=errors)
