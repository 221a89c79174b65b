"""OHLCV and sentiment ingestion, feature engineering, and labeled datasets.

Features are backward-looking only; the label at row t compares volume at
t+1 against t, so the final row is always unlabeled and dropped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DomainError,
    EmptyInputError,
    IngestionError,
    InsufficientDataError,
    InvalidParameterError,
    MissingDataError,
)
from .fracdiff import fracdiff_fixed
from .series import TimeSeries

OHLCV_HEADER = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume")
SENTIMENT_HEADER_PARTS = ("Date", "Company", "Positive", "Negative", "Neutral")
SENTIMENT_HEADER_SCORE = ("Date", "Company", "Score")

DEFAULT_SPLIT_FRACTION = 0.8
FEATURE_FD_CLOSE = "fd_close"
FEATURE_PRICE_CHANGE = "price_change"
FEATURE_VOLUME_SIGN = "volume_sign"
FEATURE_SENTIMENT = "sentiment"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OhlcvFrame:
    dates: np.ndarray
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    adj_close: np.ndarray
    volume: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        cols = {}
        for name in ("open", "high", "low", "close", "adj_close", "volume"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 1 or len(arr) != len(dates):
                raise DataError(f"column {name} must be 1-D with one value per date")
            if not np.all(np.isfinite(arr)):
                raise DataError(f"column {name} contains non-finite values")
            cols[name] = arr
        if len(dates) == 0:
            raise EmptyInputError("frame has no rows")
        if len(dates) > 1 and not np.all(np.diff(dates).astype(np.int64) > 0):
            raise DataError("dates must be strictly increasing")
        for name in ("open", "high", "low", "close", "adj_close"):
            if not np.all(cols[name] > 0.0):
                raise DataError(f"column {name} must be positive")
        if not (
            np.all(cols["low"] <= cols["open"])
            and np.all(cols["open"] <= cols["high"])
            and np.all(cols["low"] <= cols["close"])
            and np.all(cols["close"] <= cols["high"])
        ):
            raise DataError("each row needs low <= open, close <= high")
        if not np.all(cols["volume"] >= 0.0):
            raise DataError("volume must be non-negative")
        object.__setattr__(self, "dates", _freeze(dates.copy()))
        for name, arr in cols.items():
            object.__setattr__(self, name, _freeze(arr.copy()))

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class SentimentFrame:
    dates: np.ndarray
    company: tuple[str, ...]
    score: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        score = np.asarray(self.score, dtype=np.float64)
        company = tuple(str(c) for c in self.company)
        if not (len(dates) == len(score) == len(company)):
            raise DataError("dates, company, and score must align")
        if len(dates) == 0:
            raise EmptyInputError("sentiment frame has no rows")
        if len(dates) > 1 and not np.all(np.diff(dates).astype(np.int64) >= 0):
            raise DataError("sentiment dates must be ascending")
        if not np.all(np.isfinite(score)):
            raise DataError("sentiment scores must be finite")
        object.__setattr__(self, "dates", _freeze(dates.copy()))
        object.__setattr__(self, "company", company)
        object.__setattr__(self, "score", _freeze(score.copy()))

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class LabeledDataset:
    feature_names: tuple[str, ...]
    x: np.ndarray
    y: np.ndarray
    dates: np.ndarray
    split_index: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        if x.ndim != 2 or x.shape[1] != len(self.feature_names):
            raise DataError("x must be 2-D with one column per feature name")
        if not (len(x) == len(y) == len(dates)):
            raise DataError("x, y, and dates must have equal row counts")
        if not np.all(np.isfinite(x)):
            raise DataError("features must be finite")
        if not np.all(np.isin(y, (-1, 1))):
            raise DataError("labels must be -1 or +1")
        if not (0 < self.split_index < len(x)):
            raise InvalidParameterError(
                f"split_index={self.split_index} leaves an empty train or test side"
            )
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "x", _freeze(x.copy()))
        object.__setattr__(self, "y", _freeze(y.copy()))
        object.__setattr__(self, "dates", _freeze(dates.copy()))

    def __len__(self) -> int:
        return len(self.y)

    @property
    def train_x(self) -> np.ndarray:
        return self.x[: self.split_index]

    @property
    def train_y(self) -> np.ndarray:
        return self.y[: self.split_index]

    @property
    def test_x(self) -> np.ndarray:
        return self.x[self.split_index :]

    @property
    def test_y(self) -> np.ndarray:
        return self.y[self.split_index :]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["Date", *self.feature_names, "Label"])
            for i in range(len(self)):
                writer.writerow(
                    [str(self.dates[i]), *(repr(float(v)) for v in self.x[i]),
                     int(self.y[i])]
                )


def _parse_date(text: str):
    try:
        return np.datetime64(text.strip(), "D")
    except ValueError:
        return None


def _parse_float(text: str):
    try:
        v = float(text)
    except ValueError:
        return None
    return v if np.isfinite(v) else None


def _read_rows(path, expected_header: tuple[str, ...]) -> list[tuple[int, list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}", lines=()) from exc
    if not rows:
        raise IngestionError(f"{path} is empty", lines=())
    header = [c.strip() for c in rows[0]]
    if header != list(expected_header):
        raise IngestionError(
            f"{path} header {header!r} does not match {list(expected_header)!r}",
            lines=(1,),
        )
    # physical line numbers: header is line 1, first data row line 2
    return [(i + 2, row) for i, row in enumerate(rows[1:]) if row]


def load_ohlcv(path) -> OhlcvFrame:
    """Parse an OHLCV CSV, reporting every offending line at once."""
    data = _read_rows(path, OHLCV_HEADER)
    if not data:
        raise IngestionError(f"{path} has a header but no data rows", lines=())
    bad: dict[int, str] = {}
    parsed = []
    for lineno, row in data:
        if len(row) != len(OHLCV_HEADER):
            bad[lineno] = f"expected {len(OHLCV_HEADER)} fields, got {len(row)}"
            continue
        date = _parse_date(row[0])
        nums = [_parse_float(c) for c in row[1:]]
        if date is None:
            bad[lineno] = f"unparseable date {row[0]!r}"
            continue
        if any(v is None for v in nums):
            bad[lineno] = "unparseable numeric field"
            continue
        o, h, l, c, adj, vol = nums
        if min(o, h, l, c, adj) <= 0.0:
            bad[lineno] = "non-positive price"
        elif not (l <= o <= h and l <= c <= h):
            bad[lineno] = "violates low <= open, close <= high"
        elif vol < 0.0:
            bad[lineno] = "negative volume"
        else:
            parsed.append((lineno, date, o, h, l, c, adj, vol))
    last_date = None
    for lineno, date, *_ in parsed:
        if last_date is not None and date <= last_date:
            bad[lineno] = f"date {date} not after previous row"
        else:
            last_date = date
    if bad:
        lines = tuple(sorted(bad))
        detail = "; ".join(f"line {ln}: {bad[ln]}" for ln in lines)
        raise IngestionError(f"{path}: {detail}", lines=lines)
    return OhlcvFrame(
        dates=np.array([r[1] for r in parsed], dtype="datetime64[D]"),
        open=[r[2] for r in parsed],
        high=[r[3] for r in parsed],
        low=[r[4] for r in parsed],
        close=[r[5] for r in parsed],
        adj_close=[r[6] for r in parsed],
        volume=[r[7] for r in parsed],
    )


def load_value_series(path) -> TimeSeries:
    """Parse a two-column `Date,Value` CSV into a TimeSeries."""
    data = _read_rows(path, ("Date", "Value"))
    if not data:
        raise IngestionError(f"{path} has a header but no data rows", lines=())
    bad: dict[int, str] = {}
    parsed = []
    for lineno, row in data:
        if len(row) != 2:
            bad[lineno] = f"expected 2 fields, got {len(row)}"
            continue
        date = _parse_date(row[0])
        value = _parse_float(row[1])
        if date is None:
            bad[lineno] = f"unparseable date {row[0]!r}"
        elif value is None:
            bad[lineno] = "unparseable value"
        else:
            parsed.append((lineno, date, value))
    last_date = None
    for lineno, date, _ in parsed:
        if last_date is not None and date <= last_date:
            bad[lineno] = f"date {date} not after previous row"
        else:
            last_date = date
    if bad:
        lines = tuple(sorted(bad))
        detail = "; ".join(f"line {ln}: {bad[ln]}" for ln in lines)
        raise IngestionError(f"{path}: {detail}", lines=lines)
    return TimeSeries(
        dates=np.array([r[1] for r in parsed], dtype="datetime64[D]"),
        values=[r[2] for r in parsed],
    )


def load_sentiment(path) -> SentimentFrame:
    """Parse sentiment CSV in either header form.

    Three-score form nets the composite as positive minus negative.
    """
    try:
        data = _read_rows(path, SENTIMENT_HEADER_PARTS)
        composite = True
    except IngestionError:
        data = _read_rows(path, SENTIMENT_HEADER_SCORE)
        composite = False
    if not data:
        raise IngestionError(f"{path} has a header but no data rows", lines=())
    n_fields = 5 if composite else 3
    bad: dict[int, str] = {}
    parsed = []
    for lineno, row in data:
        if len(row) != n_fields:
            bad[lineno] = f"expected {n_fields} fields, got {len(row)}"
            continue
        date = _parse_date(row[0])
        if date is None:
            bad[lineno] = f"unparseable date {row[0]!r}"
            continue
        nums = [_parse_float(c) for c in row[2:]]
        if any(v is None for v in nums):
            bad[lineno] = "unparseable score"
            continue
        score = nums[0] - nums[1] if composite else nums[0]
        parsed.append((lineno, date, row[1], score))
    last_date = None
    for lineno, date, *_ in parsed:
        if last_date is not None and date < last_date:
            bad[lineno] = f"date {date} before previous row"
        else:
            last_date = date
    if bad:
        lines = tuple(sorted(bad))
        detail = "; ".join(f"line {ln}: {bad[ln]}" for ln in lines)
        raise IngestionError(f"{path}: {detail}", lines=lines)
    return SentimentFrame(
        dates=np.array([r[1] for r in parsed], dtype="datetime64[D]"),
        company=tuple(r[2] for r in parsed),
        score=[r[3] for r in parsed],
    )


def aggregate_sentiment(frame: SentimentFrame, date) -> float:
    """Mean score over the companies reporting on the given date."""
    day = np.datetime64(date, "D")
    mask = frame.dates == day
    if not np.any(mask):
        raise MissingDataError(f"no sentiment scores for {day}")
    return float(frame.score[mask].mean())


def daily_price_change(frame: OhlcvFrame) -> TimeSeries:
    """Intraday relative move: (close - open) / open, one value per row."""
    if not np.all(frame.open > 0.0):
        raise DomainError("open prices must be positive")
    return TimeSeries(
        dates=frame.dates, values=(frame.close - frame.open) / frame.open
    )


def volume_direction_target(frame: OhlcvFrame) -> np.ndarray:
    """Label row t by the next day's volume move: +1 iff volume rises strictly."""
    if len(frame) < 2:
        raise InsufficientDataError(
            "need at least 2 rows to label volume direction", required=2
        )
    rises = np.diff(frame.volume) > 0.0
    return np.where(rises, 1, -1).astype(np.int64)


def build_dataset(
    frame: OhlcvFrame,
    sentiment: SentimentFrame | None,
    d: float,
    tau: float = 1e-4,
    split_fraction: float = DEFAULT_SPLIT_FRACTION,
) -> LabeledDataset:
    """Assemble features and next-day volume labels, split chronologically.

    Rows lost to the fixed-window warm-up, the volume-sign lookback, missing
    sentiment, or the unlabeled final row are dropped before splitting.
    """
    if not (0.0 < split_fraction < 1.0):
        raise InvalidParameterError(
            f"split_fraction={split_fraction} outside (0, 1)"
        )
    if not (0.0 <= d <= 2.0):
        raise InvalidParameterError(f"d={d} outside [0, 2]")
    close = TimeSeries(dates=frame.dates, values=frame.close)
    fd = fracdiff_fixed(close, d, tau)
    window = len(frame) - len(fd) + 1
    change = daily_price_change(frame)
    labels = volume_direction_target(frame)
    vol_sign = np.where(np.diff(frame.volume) > 0.0, 1.0, -1.0)

    names = [FEATURE_FD_CLOSE, FEATURE_PRICE_CHANGE, FEATURE_VOLUME_SIGN]
    senti_map: dict | None = None
    if sentiment is not None:
        names.append(FEATURE_SENTIMENT)
        days, inverse = np.unique(sentiment.dates, return_inverse=True)
        sums = np.bincount(inverse, weights=sentiment.score)
        counts = np.bincount(inverse)
        senti_map = dict(zip(days.tolist(), (sums / counts).tolist()))

    start = max(window - 1, 1)  # fd needs the warm-up, vol_sign needs t >= 1
    rows_x, rows_y, rows_dates = [], [], []
    for t in range(start, len(frame) - 1):
        feats = [
            fd.values[t - (window - 1)],
            change.values[t],
            vol_sign[t - 1],
        ]
        if senti_map is not None:
            mean = senti_map.get(frame.dates[t].item())
            if mean is None:
                continue
            feats.append(mean)
        rows_x.append(feats)
        rows_y.append(labels[t])
        rows_dates.append(frame.dates[t])
    if not rows_x:
        raise EmptyInputError("no rows with all features defined")
    split_index = int(len(rows_x) * split_fraction)
    return LabeledDataset(
        feature_names=tuple(names),
        x=np.asarray(rows_x, dtype=np.float64),
        y=np.asarray(rows_y, dtype=np.int64),
        dates=np.asarray(rows_dates, dtype="datetime64[D]"),
        split_index=split_index,
    )
