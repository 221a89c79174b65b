"""Binary classifiers over {-1, +1} labels: logistic regression, KNN, random forest.

All three train deterministically: repeat runs on identical inputs produce
byte-identical models and predictions. Feature standardization statistics are
estimated on training rows only.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit, xlogy

from .errors import (
    DataError,
    DegenerateLabelsError,
    InvalidParameterError,
)

MODEL_KINDS = ("logreg", "knn", "forest")
CRITERIA = ("gini", "entropy")
LOGREG_L2 = 1.0
LOGREG_MAX_ITER = 10000
LOGREG_GRAD_TOL = 1e-6
MODEL_FORMAT_VERSION = 1

# split must strictly reduce impurity; tolerance guards float noise
_MIN_IMPURITY_DECREASE = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    k: int = 0
    criterion: str = "gini"
    max_leaf_nodes: int = 0
    n_trees: int = 100
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidParameterError(f"unknown model kind {self.kind!r}")
        if self.kind == "knn" and self.k < 1:
            raise InvalidParameterError(f"k={self.k} must be >= 1")
        if self.kind == "forest":
            if self.criterion not in CRITERIA:
                raise InvalidParameterError(f"unknown criterion {self.criterion!r}")
            if self.max_leaf_nodes < 2:
                raise InvalidParameterError(
                    f"max_leaf_nodes={self.max_leaf_nodes} must be >= 2"
                )
            if self.n_trees < 1:
                raise InvalidParameterError(f"n_trees={self.n_trees} must be >= 1")

    @classmethod
    def logreg(cls, standardize: bool = True) -> "ModelSpec":
        return cls(kind="logreg", standardize=standardize)

    @classmethod
    def knn(cls, k: int, standardize: bool = True) -> "ModelSpec":
        return cls(kind="knn", k=k, standardize=standardize)

    @classmethod
    def forest(
        cls,
        criterion: str = "gini",
        max_leaf_nodes: int = 50,
        n_trees: int = 100,
        seed: int = 0,
        standardize: bool = True,
    ) -> "ModelSpec":
        return cls(
            kind="forest",
            criterion=criterion,
            max_leaf_nodes=max_leaf_nodes,
            n_trees=n_trees,
            seed=seed,
            standardize=standardize,
        )


@dataclass(frozen=True)
class Tree:
    """Flat binary tree; feature[j] < 0 marks a leaf voting vote[j] in {0, 1}."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    vote: np.ndarray

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def predict01(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(len(x), dtype=np.float64)
        for i, row in enumerate(x):
            j = 0
            while self.feature[j] >= 0:
                if row[self.feature[j]] <= self.threshold[j]:
                    j = self.left[j]
                else:
                    j = self.right[j]
            out[i] = self.vote[j]
        return out


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    n_features: int
    means: np.ndarray | None
    stds: np.ndarray | None
    coef: np.ndarray | None = None
    intercept: float = 0.0
    n_iter: int = 0
    grad_norm: float = 0.0
    train_x: np.ndarray | None = None
    train_y: np.ndarray | None = None
    trees: tuple[Tree, ...] = field(default_factory=tuple)


def _check_matrix(x, n_features: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidParameterError("feature matrix must be 2-D and non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("feature matrix must be finite")
    if n_features is not None and arr.shape[1] != n_features:
        raise InvalidParameterError(
            f"expected {n_features} features, got {arr.shape[1]}"
        )
    return arr


def _check_training_labels(y, n_rows: int) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1 or len(arr) != n_rows:
        raise InvalidParameterError("labels must be 1-D and match the row count")
    if not np.all(np.isin(arr, (-1, 1))):
        raise InvalidParameterError("labels must be -1 or +1")
    return arr.astype(np.int64)


def _standardize_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    stds = np.where(stds > 0.0, stds, 1.0)  # constant columns pass through
    return means, stds


def _apply_standardize(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    if model.means is None:
        return x
    return (x - model.means) / model.stds


def _train_logreg(spec: ModelSpec, x: np.ndarray, y: np.ndarray,
                  means, stds) -> TrainedModel:
    n, p = x.shape
    # minimize sum_i log(1+exp(-y_i z_i)) + (l2/2)||w||^2, intercept unpenalized
    xa = np.hstack([x, np.ones((n, 1))])
    wa = np.zeros(p + 1)
    smax = np.linalg.svd(xa, compute_uv=False)[0]
    lipschitz = LOGREG_L2 + 0.25 * smax * smax
    step = 1.0 / lipschitz
    grad_norm = math.inf
    it = 0
    for it in range(1, LOGREG_MAX_ITER + 1):
        z = y * (xa @ wa)
        s = expit(-z)
        grad = -(xa.T @ (s * y))
        grad[:p] += LOGREG_L2 * wa[:p]
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= LOGREG_GRAD_TOL:
            break
        wa = wa - step * grad
    return TrainedModel(
        spec=spec, n_features=p, means=means, stds=stds,
        coef=wa[:p].copy(), intercept=float(wa[p]),
        n_iter=it, grad_norm=grad_norm,
    )


def _weighted_impurity(pos: np.ndarray, n: np.ndarray, criterion: str) -> np.ndarray:
    """n * impurity(pos/n) for each candidate, vectorized over candidates."""
    pos = np.asarray(pos, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    neg = n - pos
    if criterion == "gini":
        return n - (pos * pos + neg * neg) / n
    # entropy in bits: n*h = n*log2 n - (pos*log2 pos + neg*log2 neg)
    ln2 = math.log(2.0)
    return (xlogy(n, n) - xlogy(pos, pos) - xlogy(neg, neg)) / ln2


def _best_split(x: np.ndarray, y01: np.ndarray, idx: np.ndarray,
                feats: np.ndarray, criterion: str):
    """Best (delta, feature, threshold) over the given feature subset, or None."""
    n = len(idx)
    pos_total = int(y01[idx].sum())
    parent = float(_weighted_impurity(pos_total, n, criterion))
    best = None
    for f in feats:
        v = x[idx, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        pos = np.cumsum(y01[idx][order])
        cut = np.flatnonzero(vs[:-1] < vs[1:])
        if len(cut) == 0:
            continue
        n_l = cut + 1.0
        pos_l = pos[cut]
        child = (
            _weighted_impurity(pos_l, n_l, criterion)
            + _weighted_impurity(pos_total - pos_l, n - n_l, criterion)
        )
        delta = parent - child
        i = int(np.argmax(delta))
        if delta[i] > _MIN_IMPURITY_DECREASE and (best is None or delta[i] > best[0]):
            thr = 0.5 * (vs[cut[i]] + vs[cut[i] + 1])
            best = (float(delta[i]), int(f), float(thr))
    return best


def _grow_tree(x: np.ndarray, y01: np.ndarray, spec: ModelSpec,
               rng: np.random.Generator) -> Tree:
    n, p = x.shape
    m_try = max(1, int(math.sqrt(p)))
    sample = rng.integers(0, n, size=n)
    feature, threshold, left, right, vote = [], [], [], [], []

    def new_leaf(idx: np.ndarray) -> int:
        pos = int(y01[idx].sum())
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        # strict majority of bootstrap rows required for a +1 vote
        vote.append(1 if 2 * pos > len(idx) else 0)
        return len(feature) - 1

    heap: list = []
    push_count = 0

    def consider(node_id: int, idx: np.ndarray):
        nonlocal push_count
        pos = int(y01[idx].sum())
        if len(idx) < 2 or pos == 0 or pos == len(idx):
            return
        feats = rng.choice(p, size=m_try, replace=False)
        found = _best_split(x, y01, idx, feats, spec.criterion)
        if found is not None:
            delta, f, thr = found
            heapq.heappush(heap, (-delta, push_count, node_id, f, thr, idx))
            push_count += 1

    root_idx = sample
    new_leaf(root_idx)
    consider(0, root_idx)
    leaves = 1
    while heap and leaves < spec.max_leaf_nodes:
        _, _, node_id, f, thr, idx = heapq.heappop(heap)
        go_left = x[idx, f] <= thr
        left_idx, right_idx = idx[go_left], idx[~go_left]
        feature[node_id] = f
        threshold[node_id] = thr
        left[node_id] = new_leaf(left_idx)
        right[node_id] = new_leaf(right_idx)
        consider(left[node_id], left_idx)
        consider(right[node_id], right_idx)
        leaves += 1
    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        vote=np.asarray(vote, dtype=np.int64),
    )


def train(spec: ModelSpec, x, y) -> TrainedModel:
    """Fit a model; deterministic for a fixed (spec, x, y)."""
    xm = _check_matrix(x)
    ym = _check_training_labels(y, len(xm))
    if spec.standardize:
        means, stds = _standardize_stats(xm)
        xs = (xm - means) / stds
    else:
        means, stds, xs = None, None, xm

    if spec.kind == "knn":
        if spec.k > len(xs):
            raise InvalidParameterError(
                f"k={spec.k} exceeds {len(xs)} training rows"
            )
        return TrainedModel(
            spec=spec, n_features=xs.shape[1], means=means, stds=stds,
            train_x=xs.copy(), train_y=ym.copy(),
        )

    if len(xs) < 2:
        raise InvalidParameterError("training needs at least 2 rows")
    classes = np.unique(ym)
    if len(classes) < 2:
        raise DegenerateLabelsError(
            f"training labels are all {int(classes[0])}; need both classes"
        )
    if spec.kind == "logreg":
        return _train_logreg(spec, xs, ym, means, stds)

    y01 = (ym == 1).astype(np.int64)
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_trees)
    trees = tuple(
        _grow_tree(xs, y01, spec, np.random.default_rng(s)) for s in seeds
    )
    return TrainedModel(
        spec=spec, n_features=xs.shape[1], means=means, stds=stds, trees=trees,
    )


def predict_scores(model: TrainedModel, x) -> np.ndarray:
    """Per-row probability of class +1, in [0, 1]."""
    xm = _check_matrix(x, model.n_features)
    xs = _apply_standardize(model, xm)
    if model.spec.kind == "logreg":
        return expit(xs @ model.coef + model.intercept)
    if model.spec.kind == "knn":
        k = model.spec.k
        scores = np.empty(len(xs), dtype=np.float64)
        for i, row in enumerate(xs):
            dist = np.sqrt(((model.train_x - row) ** 2).sum(axis=1))
            # stable sort: equal distances resolve to the lower training row
            nearest = np.argsort(dist, kind="stable")[:k]
            scores[i] = np.mean(model.train_y[nearest] == 1)
        return scores
    votes = np.zeros(len(xs), dtype=np.float64)
    for tree in model.trees:
        votes += tree.predict01(xs)
    return votes / len(model.trees)


def predict_labels(model: TrainedModel, x, threshold: float = 0.5) -> np.ndarray:
    """+1 where score >= threshold, else -1."""
    if not (0.0 < threshold < 1.0):
        raise InvalidParameterError(f"threshold={threshold} outside (0, 1)")
    scores = predict_scores(model, x)
    return np.where(scores >= threshold, 1, -1).astype(np.int64)


def _spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "kind": spec.kind, "k": spec.k, "criterion": spec.criterion,
        "max_leaf_nodes": spec.max_leaf_nodes, "n_trees": spec.n_trees,
        "seed": spec.seed, "standardize": spec.standardize,
    }


def _array_or_none(a):
    return None if a is None else [float(v) for v in a]


def save_model(model: TrainedModel, path) -> None:
    """Write a JSON snapshot; reloading reproduces predictions byte-for-byte."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": _spec_to_dict(model.spec),
        "n_features": model.n_features,
        "means": _array_or_none(model.means),
        "stds": _array_or_none(model.stds),
    }
    kind = model.spec.kind
    if kind == "logreg":
        doc["coef"] = _array_or_none(model.coef)
        doc["intercept"] = model.intercept
        doc["n_iter"] = model.n_iter
        doc["grad_norm"] = model.grad_norm
    elif kind == "knn":
        doc["train_x"] = [[float(v) for v in row] for row in model.train_x]
        doc["train_y"] = [int(v) for v in model.train_y]
    else:
        doc["trees"] = [
            {
                "feature": [int(v) for v in t.feature],
                "threshold": [float(v) for v in t.threshold],
                "left": [int(v) for v in t.left],
                "right": [int(v) for v in t.right],
                "vote": [int(v) for v in t.vote],
            }
            for t in model.trees
        ]
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_model(path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format_version {version!r}")
    spec = ModelSpec(**doc["spec"])
    means = doc["means"]
    stds = doc["stds"]
    common = {
        "spec": spec,
        "n_features": int(doc["n_features"]),
        "means": None if means is None else np.asarray(means, dtype=np.float64),
        "stds": None if stds is None else np.asarray(stds, dtype=np.float64),
    }
    if spec.kind == "logreg":
        return TrainedModel(
            coef=np.asarray(doc["coef"], dtype=np.float64),
            intercept=float(doc["intercept"]),
            n_iter=int(doc["n_iter"]),
            grad_norm=float(doc["grad_norm"]),
            **common,
        )
    if spec.kind == "knn":
        return TrainedModel(
            train_x=np.asarray(doc["train_x"], dtype=np.float64),
            train_y=np.asarray(doc["train_y"], dtype=np.int64),
            **common,
        )
    trees = tuple(
        Tree(
            feature=np.asarray(t["feature"], dtype=np.int64),
            threshold=np.asarray(t["threshold"], dtype=np.float64),
            left=np.asarray(t["left"], dtype=np.int64),
            right=np.asarray(t["right"], dtype=np.int64),
            vote=np.asarray(t["vote"], dtype=np.int64),
        )
        for t in doc["trees"]
    )
    return TrainedModel(trees=trees, **common)
