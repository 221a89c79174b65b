"""Ingestion, feature engineering, target construction, and split behavior."""

import csv
from pathlib import Path

import numpy as np
import pytest

from fdkit.dataset import (
    LabeledDataset,
    OhlcvFrame,
    SentimentFrame,
    aggregate_sentiment,
    build_dataset,
    daily_price_change,
    load_ohlcv,
    load_sentiment,
    volume_direction_target,
)
from fdkit.errors import (
    DataError,
    EmptyInputError,
    IngestionError,
    InsufficientDataError,
    InvalidParameterError,
    MissingDataError,
)

DATA_DIR = Path(__file__).parent / "data"


def make_frame(closes, volumes, start="2020-01-01"):
    closes = np.asarray(closes, dtype=np.float64)
    volumes = np.asarray(volumes, dtype=np.float64)
    opens = closes * 0.995
    highs = np.maximum(opens, closes) * 1.01
    lows = np.minimum(opens, closes) * 0.99
    dates = np.datetime64(start, "D") + np.arange(len(closes))
    return OhlcvFrame(
        dates=dates, open=opens, high=highs, low=lows,
        close=closes, adj_close=closes, volume=volumes,
    )


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


OHLCV_ROW = ["2020-01-02", "100.0", "101.0", "99.0", "100.5", "100.2", "5000"]


def ohlcv_row(date, open_=100.0, high=101.0, low=99.0, close=100.5,
              adj=100.2, vol=5000):
    return [date, str(open_), str(high), str(low), str(close), str(adj), str(vol)]


class TestLoadOhlcv:
    def test_bundled_sample(self):
        frame = load_ohlcv(DATA_DIR / "sample_ohlcv.csv")
        assert len(frame) == 10
        assert frame.dates[0] == np.datetime64("2020-01-02")
        assert frame.close[-1] == 101.50
        assert frame.volume[3] == 1420000

    def test_high_below_low_names_line_3(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"], [
            ohlcv_row("2020-01-02"),
            ohlcv_row("2020-01-03", open_=100.0, high=98.0, low=99.0, close=98.5),
            ohlcv_row("2020-01-06"),
        ])
        with pytest.raises(IngestionError) as err:
            load_ohlcv(p)
        assert err.value.lines == (3,)
        assert "line 3" in str(err.value)

    def test_all_offending_lines_reported(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"], [
            ohlcv_row("2020-01-02", open_=-5.0),          # line 2
            ohlcv_row("2020-01-03"),
            ohlcv_row("not-a-date"),                      # line 4
            ohlcv_row("2020-01-07", vol=-1),              # line 5
        ])
        with pytest.raises(IngestionError) as err:
            load_ohlcv(p)
        assert err.value.lines == (2, 4, 5)

    def test_missing_column_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Open", "High", "Low", "Close", "Volume"],
                  [["2020-01-02", "1", "2", "0.5", "1.5", "100"]])
        with pytest.raises(IngestionError):
            load_ohlcv(p)

    def test_out_of_order_dates_flagged(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"], [
            ohlcv_row("2020-01-06"),
            ohlcv_row("2020-01-03"),
        ])
        with pytest.raises(IngestionError) as err:
            load_ohlcv(p)
        assert err.value.lines == (3,)

    def test_unparseable_number_flagged(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"],
                  [ohlcv_row("2020-01-02", close="oops")])
        with pytest.raises(IngestionError) as err:
            load_ohlcv(p)
        assert err.value.lines == (2,)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(IngestionError):
            load_ohlcv(p)


class TestLoadSentiment:
    def test_three_score_form_nets_composite(self):
        frame = load_sentiment(DATA_DIR / "sample_sentiment.csv")
        assert len(frame) == 12
        # first row: 0.60 - 0.20
        assert frame.score[0] == pytest.approx(0.4)
        assert frame.company[1] == "BBB"

    def test_single_score_form(self, tmp_path):
        p = tmp_path / "scores.csv"
        write_csv(p, ["Date", "Company", "Score"], [
            ["2020-01-02", "AAA", "0.25"],
            ["2020-01-03", "BBB", "-0.10"],
        ])
        frame = load_sentiment(p)
        assert list(frame.score) == [0.25, -0.10]

    def test_unknown_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Mood"], [["2020-01-02", "good"]])
        with pytest.raises(IngestionError):
            load_sentiment(p)

    def test_bad_score_line_reported(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["Date", "Company", "Score"], [
            ["2020-01-02", "AAA", "0.2"],
            ["2020-01-03", "AAA", "inf"],
        ])
        with pytest.raises(IngestionError) as err:
            load_sentiment(p)
        assert err.value.lines == (3,)


class TestAggregateSentiment:
    def setup_method(self):
        self.frame = SentimentFrame(
            dates=np.array(["2020-01-02", "2020-01-02", "2020-01-03"],
                           dtype="datetime64[D]"),
            company=("AAA", "BBB", "AAA"),
            score=[0.2, 0.4, 0.7],
        )

    def test_mean_of_two(self):
        assert aggregate_sentiment(self.frame, "2020-01-02") == pytest.approx(0.3)

    def test_single_company(self):
        assert aggregate_sentiment(self.frame, "2020-01-03") == 0.7

    def test_missing_date(self):
        with pytest.raises(MissingDataError):
            aggregate_sentiment(self.frame, "2020-02-01")

    def test_all_zero_scores(self):
        frame = SentimentFrame(
            dates=np.repeat(np.datetime64("2020-01-02", "D"), 35),
            company=tuple(f"C{i}" for i in range(35)),
            score=np.zeros(35),
        )
        assert aggregate_sentiment(frame, "2020-01-02") == 0.0


class TestDailyPriceChange:
    def test_formula(self):
        frame = OhlcvFrame(
            dates=np.array(["2020-01-02", "2020-01-03", "2020-01-06"],
                           dtype="datetime64[D]"),
            open=[100.0, 120.0, 200.0],
            high=[106.0, 121.0, 201.0],
            low=[99.0, 118.0, 189.0],
            close=[105.0, 120.0, 190.0],
            adj_close=[105.0, 120.0, 190.0],
            volume=[1.0, 1.0, 1.0],
        )
        out = daily_price_change(frame)
        assert out.values == pytest.approx([0.05, 0.0, -0.05])
        assert np.array_equal(out.dates, frame.dates)


class TestVolumeDirectionTarget:
    def test_rise(self):
        assert list(volume_direction_target(make_frame([1, 1.1], [100, 150]))) == [1]

    def test_flat_is_negative(self):
        assert list(volume_direction_target(make_frame([1, 1.1], [150, 150]))) == [-1]

    def test_three_rows(self):
        frame = make_frame([1, 1.1, 1.2], [100, 90, 95])
        assert list(volume_direction_target(frame)) == [-1, 1]

    def test_single_row(self):
        with pytest.raises(InsufficientDataError):
            volume_direction_target(make_frame([1.0], [100]))


def random_frame(rng, n=80):
    closes = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.01, size=n)))
    volumes = rng.integers(1000, 2000, size=n).astype(float)
    return make_frame(closes, volumes)


def full_sentiment_for(frame, rng):
    return SentimentFrame(
        dates=frame.dates,
        company=tuple("AAA" for _ in range(len(frame))),
        score=rng.normal(0, 0.2, size=len(frame)),
    )


class TestBuildDataset:
    def test_d_zero_feature_equals_close(self):
        rng = np.random.default_rng(211)
        frame = random_frame(rng, 50)
        data = build_dataset(frame, None, d=0.0, split_fraction=0.8)
        # d=0 window is 1; rows start at t=1 (volume-sign lookback) and stop
        # before the unlabeled final row
        assert len(data) == 48
        assert data.feature_names == ("fd_close", "price_change", "volume_sign")
        assert np.array_equal(data.x[:, 0], frame.close[1:-1])
        assert np.array_equal(data.dates, frame.dates[1:-1])

    def test_d_one_feature_equals_price_diff(self):
        rng = np.random.default_rng(223)
        frame = random_frame(rng, 50)
        data = build_dataset(frame, None, d=1.0)
        assert data.x[:, 0] == pytest.approx(np.diff(frame.close)[:-1], abs=1e-12)

    def test_labels_match_target_op(self):
        rng = np.random.default_rng(227)
        frame = random_frame(rng, 50)
        data = build_dataset(frame, None, d=0.0)
        assert np.array_equal(data.y, volume_direction_target(frame)[1:])

    def test_volume_sign_feature_is_backward_looking(self):
        frame = make_frame([1.0, 1.1, 1.2, 1.3, 1.4], [100, 150, 120, 130, 90])
        data = build_dataset(frame, None, d=0.0, split_fraction=0.5)
        # rows are t=1..3; sign of (vol_t - vol_{t-1})
        assert list(data.x[:, 2]) == [1.0, -1.0, 1.0]
        assert list(data.y) == [-1, 1, -1]

    def test_sentiment_feature_and_missing_dates_dropped(self):
        rng = np.random.default_rng(229)
        frame = random_frame(rng, 40)
        senti = full_sentiment_for(frame, rng)
        full = build_dataset(frame, senti, d=0.0)
        assert full.feature_names[-1] == "sentiment"
        assert len(full) == 38

        # drop sentiment for two interior dates: those rows vanish
        keep = ~np.isin(senti.dates, frame.dates[[5, 9]])
        sparse = SentimentFrame(
            dates=senti.dates[keep],
            company=tuple(c for c, k in zip(senti.company, keep) if k),
            score=senti.score[keep],
        )
        trimmed = build_dataset(frame, sparse, d=0.0)
        assert len(trimmed) == 36
        assert not np.isin(frame.dates[[5, 9]], trimmed.dates).any()

    def test_sentiment_none_keeps_row_count(self):
        rng = np.random.default_rng(233)
        frame = random_frame(rng, 40)
        with_senti = build_dataset(frame, full_sentiment_for(frame, rng), d=0.3, tau=0.05)
        without = build_dataset(frame, None, d=0.3, tau=0.05)
        assert len(with_senti) == len(without)
        assert "sentiment" not in without.feature_names

    def test_sentiment_averaged_per_date(self):
        frame = make_frame([1.0, 1.1, 1.2, 1.3], [100, 150, 120, 130])
        senti = SentimentFrame(
            dates=np.repeat(frame.dates, 2),
            company=("A", "B") * 4,
            score=[0.2, 0.4, 0.1, 0.5, -0.2, 0.6, 0.0, 0.0],
        )
        data = build_dataset(frame, senti, d=0.0, split_fraction=0.5)
        assert data.x[:, 3] == pytest.approx([0.3, 0.2])

    def test_no_leakage_in_split(self):
        rng = np.random.default_rng(239)
        frame = random_frame(rng, 60)
        data = build_dataset(frame, None, d=0.4, tau=0.05, split_fraction=0.8)
        assert data.split_index == int(len(data) * 0.8)
        assert data.dates[: data.split_index].max() < data.dates[data.split_index :].min()
        assert len(data.train_x) + len(data.test_x) == len(data)

    def test_future_volume_changes_only_last_label(self):
        rng = np.random.default_rng(241)
        closes = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.01, size=30)))
        volumes = rng.integers(1000, 2000, size=30).astype(float)
        base = build_dataset(make_frame(closes, volumes), None, d=0.3, tau=0.05)
        bumped_vol = volumes.copy()
        bumped_vol[-1] = 10.0 * volumes[-1]
        bumped = build_dataset(make_frame(closes, bumped_vol), None, d=0.3, tau=0.05)
        assert np.array_equal(base.x, bumped.x)
        assert np.array_equal(base.y[:-1], bumped.y[:-1])
        assert bumped.y[-1] == 1

    def test_deterministic(self):
        rng = np.random.default_rng(251)
        frame = random_frame(rng, 70)
        a = build_dataset(frame, None, d=0.5, tau=0.05)
        b = build_dataset(frame, None, d=0.5, tau=0.05)
        assert a.x.tobytes() == b.x.tobytes()
        assert a.y.tobytes() == b.y.tobytes()

    def test_empty_intersection_rejected(self):
        rng = np.random.default_rng(257)
        frame = random_frame(rng, 20)
        other_dates = frame.dates + np.timedelta64(365, "D")
        senti = SentimentFrame(
            dates=other_dates,
            company=tuple("AAA" for _ in other_dates),
            score=np.zeros(len(other_dates)),
        )
        with pytest.raises(EmptyInputError):
            build_dataset(frame, senti, d=0.0)

    def test_parameter_validation(self):
        frame = make_frame([1.0, 1.1, 1.2, 1.3], [1, 2, 3, 4])
        with pytest.raises(InvalidParameterError):
            build_dataset(frame, None, d=0.0, split_fraction=1.0)
        with pytest.raises(InvalidParameterError):
            build_dataset(frame, None, d=2.5)

    def test_degenerate_split_rejected(self):
        frame = make_frame([1.0, 1.1, 1.2, 1.3], [1, 2, 3, 4])
        # two surviving rows; fraction 0.9 floors to split_index 1 (fine),
        # fraction 0.99 also floors to 1, but 0.4 floors to 0
        with pytest.raises(InvalidParameterError):
            build_dataset(frame, None, d=0.0, split_fraction=0.4)


class TestLabeledDataset:
    def _dataset(self):
        return LabeledDataset(
            feature_names=("a", "b"),
            x=[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
            y=[1, -1, 1],
            dates=np.array(["2020-01-02", "2020-01-03", "2020-01-06"],
                           dtype="datetime64[D]"),
            split_index=2,
        )

    def test_invariant_checks(self):
        with pytest.raises(DataError):
            LabeledDataset(("a",), [[1.0]], [2],
                           np.array(["2020-01-02"], dtype="datetime64[D]"), 1)
        with pytest.raises(InvalidParameterError):
            LabeledDataset(("a",), [[1.0], [2.0]], [1, -1],
                           np.array(["2020-01-02", "2020-01-03"],
                                    dtype="datetime64[D]"), 2)

    def test_train_test_views(self):
        data = self._dataset()
        assert len(data.train_x) == 2 and len(data.test_x) == 1
        assert list(data.test_y) == [1]

    def test_csv_round_trip(self, tmp_path):
        data = self._dataset()
        path = tmp_path / "out.csv"
        data.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["Date", "a", "b", "Label"]
        assert rows[1] == ["2020-01-02", "1.0", "2.0", "1"]
        assert [float(r[1]) for r in rows[1:]] == [1.0, 3.0, 5.0]
