"""Fractional differencing toolkit.

Memory-preserving stationarity transforms for daily price series, the
diagnostics used to pick the differencing order (ADF, KPSS, ACF, Hurst),
and a small prediction pipeline that turns a differenced price series plus
auxiliary features into next-day volume-direction labels.
"""

from .errors import (
    DataError,
    DegenerateInputError,
    DegenerateLabelsError,
    DomainError,
    EmptyInputError,
    FdkitError,
    IngestionError,
    InsufficientDataError,
    InvalidParameterError,
    MissingDataError,
    NoStationaryDError,
    PoleError,
    SingularRegressionError,
    UndefinedAUCError,
)
from .fracdiff import (
    FdWeights,
    Truncation,
    fd_weights,
    fd_weights_gamma,
    fixed_window_weights,
    fracdiff_expanding,
    fracdiff_fixed,
    fracdiff_inverse,
    truncate_by_magnitude,
    weight_loss,
)
from .dsearch import (
    DScanRow,
    HeatmapGrid,
    heatmap,
    scan_d,
    select_optimal_d,
)
from .classify import (
    ModelSpec,
    TrainedModel,
    load_model,
    predict_labels,
    predict_scores,
    save_model,
    train,
)
from .dataset import (
    LabeledDataset,
    OhlcvFrame,
    SentimentFrame,
    aggregate_sentiment,
    build_dataset,
    daily_price_change,
    load_ohlcv,
    load_sentiment,
    load_value_series,
    volume_direction_target,
)
from .metrics import (
    ConfusionMatrix,
    MetricReport,
    basic_metrics,
    cohens_kappa,
    confusion,
    mcc,
    metric_report,
    rocauc,
)
from .series import TimeSeries
from .stattests import (
    AcfResult,
    StatTestResult,
    acf,
    adf_test,
    hurst_exponent,
    kpss_test,
    log_returns,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
