"""Daily time series carrier used by every transform in the package."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputError, InvalidParameterError


@dataclass
class TimeSeries:
    """An ordered daily series of real values.

    Invariants enforced at construction: timestamps strictly increasing,
    values finite, equal lengths, length >= 1. Arrays are normalized to
    datetime64[D] / float64 and marked read-only, so instances are safe to
    share across threads.
    """

    dates: np.ndarray
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=np.float64)
        if dates.ndim != 1 or values.ndim != 1:
            raise InvalidParameterError("dates and values must be 1-dimensional")
        if len(dates) != len(values):
            raise InvalidParameterError(
                f"length mismatch: {len(dates)} dates vs {len(values)} values"
            )
        if len(values) == 0:
            raise EmptyInputError("a TimeSeries cannot be empty")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise InvalidParameterError(
                f"non-finite value at index {bad} ({dates[bad]})"
            )
        if len(dates) > 1 and not np.all(np.diff(dates).astype(np.int64) > 0):
            bad = int(np.flatnonzero(np.diff(dates).astype(np.int64) <= 0)[0])
            raise InvalidParameterError(
                f"timestamps must be strictly increasing (violation after {dates[bad]})"
            )
        dates = dates.copy()
        values = values.copy()
        dates.setflags(write=False)
        values.setflags(write=False)
        self.dates = dates
        self.values = values

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, values, start: str = "2000-01-01", name: str = "") -> "TimeSeries":
        """Build a series on consecutive calendar days; handy for synthetic data."""
        values = np.asarray(values, dtype=np.float64)
        start_day = np.datetime64(start, "D")
        dates = start_day + np.arange(len(values))
        return cls(dates=dates, values=values, name=name)

    def drop_leading(self, count: int) -> "TimeSeries":
        """Return the series without its first `count` observations."""
        if count < 0:
            raise InvalidParameterError("count must be >= 0")
        if count >= len(self):
            raise EmptyInputError(
                f"dropping {count} of {len(self)} observations leaves an empty series"
            )
        if count == 0:
            return self
        return TimeSeries(self.dates[count:], self.values[count:], self.name)

    def with_values(self, values, name: str | None = None) -> "TimeSeries":
        """Same timestamps, new values."""
        return TimeSeries(self.dates, values, self.name if name is None else name)
