"""Binary-classification metrics over {-1, +1} labels; +1 is the positive class."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidParameterError, UndefinedAUCError

KAPPA_BANDS = ("Slight", "Fair", "Moderate", "Substantial", "Perfect")
REPORT_COLUMNS = ("Accuracy", "ROCAUC", "Precision", "Recall", "MCC", "Kappa")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        counts = (self.tp, self.tn, self.fp, self.fn)
        if any(c < 0 or c != int(c) for c in counts):
            raise InvalidParameterError("confusion counts must be non-negative integers")
        if sum(counts) < 1:
            raise InvalidParameterError("confusion matrix must count at least one sample")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class BasicMetrics:
    accuracy: float
    precision: float
    recall: float
    precision_degenerate: bool = False
    recall_degenerate: bool = False

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.accuracy, self.precision, self.recall)


@dataclass(frozen=True)
class KappaResult:
    value: float
    band: str
    degenerate: bool = False


@dataclass(frozen=True)
class MetricReport:
    """One evaluation row; serializes in the column order of REPORT_COLUMNS."""

    accuracy: float
    precision: float
    recall: float
    rocauc: float
    mcc: float
    kappa: float
    kappa_band: str

    def __post_init__(self):
        for name in ("accuracy", "precision", "recall", "rocauc"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidParameterError(f"{name}={v} outside [0, 1]")
        for name in ("mcc", "kappa"):
            v = getattr(self, name)
            if not (-1.0 <= v <= 1.0):
                raise InvalidParameterError(f"{name}={v} outside [-1, 1]")
        if self.kappa_band not in KAPPA_BANDS:
            raise InvalidParameterError(f"unknown kappa band {self.kappa_band!r}")

    def to_csv_row(self) -> str:
        return ",".join(
            f"{v:.6f}" for v in (self.accuracy, self.rocauc, self.precision,
                                 self.recall, self.mcc, self.kappa)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "Accuracy": self.accuracy,
                "ROCAUC": self.rocauc,
                "Precision": self.precision,
                "Recall": self.recall,
                "MCC": self.mcc,
                "Kappa": self.kappa,
                "KappaBand": self.kappa_band,
            }
        )


def _check_labels(y) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1 or len(arr) < 1:
        raise InvalidParameterError("labels must be a non-empty 1-D sequence")
    if not np.all(np.isin(arr, (-1, 1))):
        raise InvalidParameterError("labels must be -1 or +1")
    return arr.astype(np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t = _check_labels(y_true)
    p = _check_labels(y_pred)
    if len(t) != len(p):
        raise InvalidParameterError(f"length mismatch: {len(t)} vs {len(p)}")
    return ConfusionMatrix(
        tp=int(np.sum((t == 1) & (p == 1))),
        tn=int(np.sum((t == -1) & (p == -1))),
        fp=int(np.sum((t == -1) & (p == 1))),
        fn=int(np.sum((t == 1) & (p == -1))),
    )


def basic_metrics(cm: ConfusionMatrix) -> BasicMetrics:
    """Accuracy, precision, recall; undefined ratios become 0 with a flag."""
    acc = (cm.tp + cm.tn) / cm.total
    prec_deg = (cm.tp + cm.fp) == 0
    rec_deg = (cm.tp + cm.fn) == 0
    prec = 0.0 if prec_deg else cm.tp / (cm.tp + cm.fp)
    rec = 0.0 if rec_deg else cm.tp / (cm.tp + cm.fn)
    return BasicMetrics(acc, prec, rec, prec_deg, rec_deg)


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation; any zero denominator factor gives 0 by convention."""
    denom = (
        (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    )
    if denom == 0:
        return 0.0
    return (cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom)


def kappa_band(value: float) -> str:
    """Right-closed bands: <=0.2 Slight, <=0.4 Fair, <=0.6 Moderate, <=0.8 Substantial."""
    for cutoff, band in ((0.2, "Slight"), (0.4, "Fair"), (0.6, "Moderate"), (0.8, "Substantial")):
        if value <= cutoff:
            return band
    return "Perfect"


def cohens_kappa(y_true, y_pred) -> KappaResult:
    """Chance-corrected agreement with the marginal-based expected rate.

    Two constant, identical labelings give p_e = 1; kappa is then defined
    as 1 and flagged degenerate.
    """
    cm = confusion(y_true, y_pred)
    n = cm.total
    p_o = (cm.tp + cm.tn) / n
    p_e = ((cm.tp + cm.fp) * (cm.tp + cm.fn) + (cm.fn + cm.tn) * (cm.fp + cm.tn)) / (n * n)
    if p_e == 1.0:
        return KappaResult(value=1.0, band="Perfect", degenerate=True)
    value = (p_o - p_e) / (1.0 - p_e)
    return KappaResult(value=value, band=kappa_band(value))


def rocauc(y_true, scores) -> float:
    """Area under the ROC curve via midranks (Mann-Whitney with tie credit)."""
    t = _check_labels(y_true)
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 1 or len(s) != len(t):
        raise InvalidParameterError("scores must be 1-D and match labels in length")
    if not np.all(np.isfinite(s)):
        raise InvalidParameterError("scores must be finite")
    pos = t == 1
    n_pos = int(pos.sum())
    n_neg = len(t) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("ROC AUC needs both classes in y_true")
    ranks = rankdata(s, method="average")
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def metric_report(y_true, y_pred, scores) -> MetricReport:
    """Full evaluation row from labels and scores."""
    cm = confusion(y_true, y_pred)
    basics = basic_metrics(cm)
    kap = cohens_kappa(y_true, y_pred)
    return MetricReport(
        accuracy=basics.accuracy,
        precision=basics.precision,
        recall=basics.recall,
        rocauc=rocauc(y_true, scores),
        mcc=mcc(cm),
        kappa=kap.value,
        kappa_band=kap.band,
    )
