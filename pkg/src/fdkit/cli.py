"""Command-line front-end: reproducible runs over every toolkit stage.

Each subcommand writes its outputs plus a `run.json` describing the invocation
into the --out directory; replaying the recorded argv reproduces the outputs
byte for byte. Exit codes: 0 success, 1 validation error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import ModelSpec, predict_labels, predict_scores, train
from .dataset import (
    OHLCV_HEADER,
    build_dataset,
    load_ohlcv,
    load_sentiment,
    load_value_series,
)
from .dsearch import (
    DEFAULT_ALPHA,
    DEFAULT_D_GRID,
    DEFAULT_HEATMAP_D_VALUES,
    DEFAULT_HEATMAP_THRESHOLDS,
    _log_values,
    heatmap,
    scan_d,
    select_optimal_d,
)
from .errors import DataError, FdkitError, IngestionError, InvalidParameterError
from .fracdiff import (
    fd_weights,
    fixed_window_weights,
    fracdiff_expanding,
    fracdiff_fixed,
    fracdiff_inverse,
)
from .metrics import REPORT_COLUMNS, metric_report
from .series import TimeSeries
from .stattests import acf, adf_test, hurst_exponent, kpss_test
from . import svgplot

RUN_FORMAT_VERSION = 1
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

DEFAULT_HURST_LAGS = (5, 10, 20, 100)
DEFAULT_MODELS = "logreg,knn:200,forest:entropy:50"
WEIGHTS_CAP = 1_000_000

COLUMN_GETTERS = {
    "Open": lambda f: f.open,
    "High": lambda f: f.high,
    "Low": lambda f: f.low,
    "Close": lambda f: f.close,
    "Adj Close": lambda f: f.adj_close,
    "Volume": lambda f: f.volume,
}


@dataclass(frozen=True)
class RunConfig:
    format_version: int
    subcommand: str
    argv: tuple[str, ...]
    params: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "format_version": self.format_version,
                "subcommand": self.subcommand,
                "argv": list(self.argv),
                "params": self.params,
            },
            indent=2,
            sort_keys=True,
        ) + "\n"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for data errors here
    def error(self, message):
        raise InvalidParameterError(message)


def _parse_floats(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse float list {text!r}") from exc
    if not values:
        raise InvalidParameterError(f"empty float list {text!r}")
    return values


def _parse_ints(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse integer list {text!r}") from exc
    if not values:
        raise InvalidParameterError(f"empty integer list {text!r}")
    return values


def _load_series(path, column: str, use_log: bool) -> TimeSeries:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            header = next(csv.reader(fh), None)
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise IngestionError(f"{path} is empty")
    header = [c.strip() for c in header]
    if header == list(OHLCV_HEADER):
        frame = load_ohlcv(path)
        series = TimeSeries(dates=frame.dates, values=COLUMN_GETTERS[column](frame))
    elif header == ["Date", "Value"]:
        series = load_value_series(path)
    else:
        raise IngestionError(
            f"{path} header {header!r} is neither OHLCV nor Date,Value"
        )
    return _log_values(series) if use_log else series


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_json(out: Path, subcommand: str, argv, args) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "subcommand")}
    for key, value in params.items():
        if isinstance(value, Path):
            params[key] = str(value)
    config = RunConfig(
        format_version=RUN_FORMAT_VERSION,
        subcommand=subcommand,
        argv=tuple(argv),
        params=params,
    )
    (out / "run.json").write_text(config.to_json(), encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _series_csv_rows(series: TimeSeries):
    return (
        [str(series.dates[i]), repr(float(series.values[i]))]
        for i in range(len(series))
    )


def _stage(name: str, fn):
    try:
        return fn()
    except FdkitError as exc:
        exc.stage = name
        raise


# ---------------------------------------------------------------- subcommands

def cmd_weights(args, out: Path) -> None:
    d_list = _parse_floats(args.d)
    if args.len is not None and args.tau is not None:
        raise InvalidParameterError("pass --len or --tau, not both")
    per_d = []
    for d in d_list:
        if args.tau is not None:
            fdw = fixed_window_weights(d, args.tau, cap=WEIGHTS_CAP)
        else:
            fdw = fd_weights(d, args.len if args.len is not None else 50)
        per_d.append(fdw)
    if len(d_list) == 1:
        rows = [[j, repr(float(w))] for j, w in enumerate(per_d[0].weights)]
        _write_csv(out / "weights.csv", ["j", "omega"], rows)
    else:
        rows = [
            [repr(float(d)), j, repr(float(w))]
            for d, fdw in zip(d_list, per_d)
            for j, w in enumerate(fdw.weights)
        ]
        _write_csv(out / "weights.csv", ["d", "j", "omega"], rows)
    if args.svg:
        chart = svgplot.line_chart(
            [(np.arange(len(fdw.weights)), fdw.weights) for fdw in per_d],
            labels=[f"d={d:g}" for d in d_list],
            title="fractional differencing weights by lag",
        )
        (out / "weights.svg").write_text(chart, encoding="utf-8")
    total = sum(len(fdw.weights) for fdw in per_d)
    print(f"wrote weights.csv ({total} rows, {len(d_list)} d value(s))")


def cmd_diff(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    if args.mode == "fixed":
        result = fracdiff_fixed(series, args.d, args.tau)
    else:
        result = fracdiff_expanding(series, args.d, args.lambda_star)
    _write_csv(out / "diff.csv", ["Date", "Value"], _series_csv_rows(result))
    dropped = len(series) - len(result)
    print(f"retained {len(result)} of {len(series)} rows (dropped {dropped})")


def cmd_simulate(args, out: Path) -> None:
    if args.n < 1:
        raise InvalidParameterError(f"--n {args.n} must be >= 1")
    rng = np.random.default_rng(args.seed)
    innovations = TimeSeries.from_values(rng.standard_normal(args.n))
    path = fracdiff_inverse(innovations, args.d)
    _write_csv(out / "simulate.csv", ["Date", "Value"], _series_csv_rows(path))
    print(f"wrote simulate.csv ({args.n} rows, d={args.d:g}, seed={args.seed})")


def _stat_test_payload(result) -> dict:
    return {
        "kind": result.kind,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "critical_values": result.critical_values,
        "lags_used": result.lags_used,
        "nobs": result.nobs,
    }


def cmd_adf(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    result = adf_test(series, args.max_lag)
    _write_json(out / "adf.json", _stat_test_payload(result))
    print(
        f"ADF statistic {result.statistic:.4f}, p-value {result.p_value:.4f}, "
        f"lags {result.lags_used}, nobs {result.nobs}"
    )


def cmd_kpss(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    result = kpss_test(series, args.bandwidth)
    _write_json(out / "kpss.json", _stat_test_payload(result))
    print(
        f"KPSS statistic {result.statistic:.4f}, p-value {result.p_value:.4f}, "
        f"bandwidth {result.lags_used}, nobs {result.nobs}"
    )


def cmd_hurst(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    lags = _parse_ints(args.lags)
    values = [hurst_exponent(series, max_lag=lag) for lag in lags]
    _write_json(out / "hurst.json", {"max_lag": lags, "hurst": values})
    for lag, h in zip(lags, values):
        print(f"hurst(max_lag={lag}) = {h:.4f}")


def cmd_acf(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    result = acf(series, args.max_lag)
    rows = [
        [int(lag), repr(float(v))] for lag, v in zip(result.lags, result.values)
    ]
    _write_csv(out / "acf.csv", ["lag", "value"], rows)
    _write_json(out / "acf.json", {
        "confidence_band": result.confidence_band,
        "nobs": result.nobs,
        "lags": [int(v) for v in result.lags],
        "values": [float(v) for v in result.values],
    })
    if args.svg:
        chart = svgplot.line_chart(
            [(result.lags, result.values)],
            labels=["acf"],
            title=f"autocorrelation (band +/-{result.confidence_band:.4f})",
            hlines=(result.confidence_band, -result.confidence_band),
        )
        (out / "acf.svg").write_text(chart, encoding="utf-8")
    print(
        f"wrote acf.csv ({len(rows)} lags, band +/-{result.confidence_band:.4f})"
    )


def cmd_scan(args, out: Path) -> None:
    series = _load_series(args.input, args.column, use_log=False)
    grid = _parse_floats(args.grid) if args.grid else list(DEFAULT_D_GRID)
    rows = scan_d(series, d_grid=grid, tau=args.tau, use_log=args.log)
    csv_rows = [
        [
            repr(float(r.d)),
            repr(float(r.adf_stat)),
            repr(float(r.adf_p)),
            repr(float(r.correlation)),
            r.n_retained,
        ]
        for r in rows
    ]
    _write_csv(
        out / "scan.csv",
        ["d", "adf_stat", "p_value", "correlation", "n_retained"],
        csv_rows,
    )
    selected = select_optimal_d(rows, alpha=args.alpha)
    print(f"selected d = {selected:g}")


def cmd_heatmap(args, out: Path) -> None:
    series = _load_series(args.input, args.column, args.log)
    thresholds = (
        _parse_floats(args.thresholds)
        if args.thresholds
        else list(DEFAULT_HEATMAP_THRESHOLDS)
    )
    d_values = (
        _parse_floats(args.d_list) if args.d_list else list(DEFAULT_HEATMAP_D_VALUES)
    )
    grid = heatmap(series, thresholds=thresholds, d_values=d_values)
    rows = [
        [
            repr(float(t)),
            repr(float(d)),
            repr(float(grid.adf_stats[i, j])),
        ]
        for i, t in enumerate(grid.thresholds)
        for j, d in enumerate(grid.d_values)
    ]
    _write_csv(out / "heatmap.csv", ["threshold", "d", "adf_stat"], rows)
    if args.svg:
        chart = svgplot.heatmap_chart(
            grid.adf_stats,
            x_labels=[f"{d:g}" for d in grid.d_values],
            y_labels=[f"{t:g}" for t in grid.thresholds],
            title="ADF statistic by weight threshold and d",
        )
        (out / "heatmap.svg").write_text(chart, encoding="utf-8")
    n_failed = len(grid.cell_errors)
    print(f"wrote heatmap.csv ({len(rows)} cells, {n_failed} failed)")


def cmd_features(args, out: Path) -> None:
    frame = load_ohlcv(args.ohlcv)
    sentiment = load_sentiment(args.sentiment) if args.sentiment else None
    data = build_dataset(
        frame, sentiment, d=args.d, tau=args.tau, split_fraction=args.split
    )
    data.to_csv(out / "features.csv")
    print(
        f"wrote features.csv ({len(data)} rows, {len(data.feature_names)} "
        f"features, split at {data.split_index})"
    )


def _parse_model(token: str, seed: int) -> ModelSpec:
    parts = [p.strip() for p in token.lower().split(":")]
    try:
        if parts[0] == "logreg" and len(parts) == 1:
            return ModelSpec.logreg()
        if parts[0] == "knn" and len(parts) == 2:
            return ModelSpec.knn(k=int(parts[1]))
        if parts[0] == "forest" and len(parts) == 3:
            return ModelSpec.forest(
                criterion=parts[1], max_leaf_nodes=int(parts[2]), seed=seed
            )
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse model {token!r}") from exc
    raise InvalidParameterError(
        f"cannot parse model {token!r}; expected logreg | knn:K | "
        f"forest:criterion:nodes"
    )


def cmd_pipeline(args, out: Path) -> None:
    if not (0.0 < args.threshold < 1.0):
        raise InvalidParameterError(f"--threshold {args.threshold} outside (0, 1)")
    specs = [
        (token.strip(), _parse_model(token, args.seed))
        for token in args.models.split(",")
        if token.strip()
    ]
    if not specs:
        raise InvalidParameterError("--models is empty")
    frame = _stage("ingest", lambda: load_ohlcv(args.ohlcv))
    sentiment = (
        _stage("ingest", lambda: load_sentiment(args.sentiment))
        if args.sentiment
        else None
    )
    data = _stage(
        "dataset",
        lambda: build_dataset(
            frame, sentiment, d=args.d, tau=args.tau, split_fraction=args.split
        ),
    )
    metric_rows = []
    prediction_rows = []
    for token, spec in specs:
        model = _stage(f"train:{token}",
                       lambda s=spec: train(s, data.train_x, data.train_y))
        scores = _stage(f"predict:{token}",
                        lambda m=model: predict_scores(m, data.test_x))
        labels = np.where(scores >= args.threshold, 1, -1).astype(np.int64)
        report = _stage(f"metrics:{token}",
                        lambda: metric_report(data.test_y, labels, scores))
        metric_rows.append([token] + report.to_csv_row().split(","))
        test_dates = data.dates[data.split_index:]
        prediction_rows.extend(
            [str(test_dates[i]), token, repr(float(scores[i])), int(labels[i])]
            for i in range(len(scores))
        )
        print(
            f"{token}: accuracy={report.accuracy:.4f} rocauc={report.rocauc:.4f} "
            f"precision={report.precision:.4f} recall={report.recall:.4f} "
            f"mcc={report.mcc:.4f} kappa={report.kappa:.4f} ({report.kappa_band})"
        )
    _write_csv(out / "metrics.csv", ["Model", *REPORT_COLUMNS], metric_rows)
    _write_csv(
        out / "predictions.csv", ["Date", "Model", "Score", "Label"],
        prediction_rows,
    )
    print(f"wrote metrics.csv ({len(metric_rows)} models) and predictions.csv")


# -------------------------------------------------------------------- parser

def _add_series_args(parser, log_default: bool = False):
    parser.add_argument("input", type=Path, help="OHLCV or Date,Value CSV")
    parser.add_argument("--column", default="Close", choices=sorted(COLUMN_GETTERS),
                        help="OHLCV column to use (default Close)")
    parser.add_argument("--log", action=argparse.BooleanOptionalAction,
                        default=log_default,
                        help="apply natural log before the operation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdkit",
                     description="fractional differencing toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory (default .)")
        return p

    p = add("weights", cmd_weights, "emit differencing weights")
    p.add_argument("--d", required=True,
                   help="differencing order, or comma list for a family")
    p.add_argument("--len", type=int, default=None,
                   help="number of weights (default 50)")
    p.add_argument("--tau", type=float, default=None,
                   help="magnitude cutoff instead of a fixed length")
    p.add_argument("--svg", action="store_true", help="also write weights.svg")

    p = add("diff", cmd_diff, "fractionally difference a series")
    _add_series_args(p)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--mode", choices=("fixed", "expanding"), default="fixed")
    p.add_argument("--tau", type=float, default=1e-4,
                   help="fixed-window weight cutoff")
    p.add_argument("--lambda-star", type=float, default=1.0,
                   help="expanding-mode weight-loss tolerance")

    p = add("simulate", cmd_simulate, "synthesize a long-memory path")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="series length")
    p.add_argument("--seed", type=int, default=0)

    p = add("adf", cmd_adf, "unit-root test")
    _add_series_args(p)
    p.add_argument("--max-lag", type=int, default=None)

    p = add("kpss", cmd_kpss, "stationarity test")
    _add_series_args(p)
    p.add_argument("--bandwidth", type=int, default=None)

    p = add("hurst", cmd_hurst, "long-memory exponent at several lag caps")
    _add_series_args(p)
    p.add_argument("--lags", default=",".join(str(v) for v in DEFAULT_HURST_LAGS),
                   help="comma list of max lags")

    p = add("acf", cmd_acf, "autocorrelation profile")
    _add_series_args(p)
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--svg", action="store_true", help="also write acf.svg")

    p = add("scan", cmd_scan, "grid-search d for stationarity plus memory")
    _add_series_args(p, log_default=True)
    p.add_argument("--grid", default=None, help="comma list of d values")
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)

    p = add("heatmap", cmd_heatmap, "ADF stat over threshold x d grid")
    _add_series_args(p, log_default=True)
    p.add_argument("--thresholds", default=None, help="comma list of cutoffs")
    p.add_argument("--d-list", default=None, help="comma list of d values")
    p.add_argument("--svg", action="store_true", help="also write heatmap.svg")

    p = add("features", cmd_features, "build a labeled dataset CSV")
    p.add_argument("ohlcv", type=Path)
    p.add_argument("--sentiment", type=Path, default=None)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--split", type=float, default=0.8)

    p = add("pipeline", cmd_pipeline, "dataset, training, and evaluation")
    p.add_argument("ohlcv", type=Path)
    p.add_argument("--sentiment", type=Path, default=None)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--models", default=DEFAULT_MODELS,
                   help="comma list: logreg | knn:K | forest:criterion:nodes")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.5)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = _out_dir(args)
        _write_run_json(out, args.subcommand, argv, args)
        args.func(args, out)
    except FdkitError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"error in stage {stage}: " if stage else "error: "
        print(prefix + str(exc), file=sys.stderr)
        if isinstance(exc, InvalidParameterError):
            return EXIT_USAGE
        if isinstance(exc, DataError):
            return EXIT_DATA
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK
