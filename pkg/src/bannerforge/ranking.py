"""CTR prediction and ranking: logistic regression, decision tree, random forest.

Models are trained on banner feature vectors with click labels, weighting
clicked samples up to counter class imbalance. Rankings order creatives by
predicted CTR; quality is measured with Mann-Whitney AUC and NDCG using CTR
as the relevance signal.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureVector

MODEL_KINDS = ("logistic_regression", "decision_tree", "random_forest")

_LEAF = -1


class SchemaMismatchError(ValueError):
    """Feature vector does not carry the schema the model was trained on."""


def fingerprint_of_names(names) -> str:
    return hashlib.sha256("|".join(names).encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class DataRow:
    banner_id: str
    features: FeatureVector
    is_clicked: int
    ctr: float

    @classmethod
    def from_counts(cls, banner_id: str, features: FeatureVector,
                    impressions: int, clicks: int) -> "DataRow":
        if impressions <= 0:
            raise ValueError(f"{banner_id}: impressions must be positive")
        if not 0 <= clicks <= impressions:
            raise ValueError(f"{banner_id}: clicks must lie in [0, impressions]")
        return cls(banner_id=banner_id, features=features,
                   is_clicked=int(clicks > 0), ctr=clicks / impressions)


@dataclass(frozen=True)
class Dataset:
    """Rows sharing one feature schema; optional slot names for importances."""

    rows: tuple[DataRow, ...]
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.rows:
            return
        fp = self.rows[0].features.full_fingerprint
        for row in self.rows:
            if row.features.full_fingerprint != fp:
                raise SchemaMismatchError(
                    f"row {row.banner_id} fingerprint {row.features.full_fingerprint} != {fp}"
                )
            if not 0.0 <= row.ctr <= 1.0:
                raise ValueError(f"{row.banner_id}: ctr {row.ctr} outside [0, 1]")
            if row.is_clicked not in (0, 1):
                raise ValueError(f"{row.banner_id}: is_clicked must be 0 or 1")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def fingerprint(self) -> str:
        if not self.rows:
            raise ValueError("empty dataset has no fingerprint")
        return self.rows[0].features.full_fingerprint

    def matrix(self) -> np.ndarray:
        return np.array([row.features.full_values() for row in self.rows], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([row.is_clicked for row in self.rows], dtype=float)

    def ctrs(self) -> np.ndarray:
        return np.array([row.ctr for row in self.rows], dtype=float)


@dataclass(frozen=True)
class ModelSpec:
    """Model kind plus its hyperparameters; unused fields are ignored per kind."""

    kind: str = "random_forest"
    # logistic regression
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 2000
    tolerance: float = 1e-6
    # decision tree
    max_depth: int = 8
    min_samples_split: int = 10
    # random forest
    n_trees: int = 100
    features_per_split: int | None = None  # None -> round(sqrt(d))
    bootstrap: bool = True
    # shared
    class_weight: str | tuple[float, float] = "balanced"  # (w_neg, w_pos) when a tuple
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        for name in ("learning_rate", "l2", "tolerance"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.max_epochs < 1 or self.n_trees < 1:
            raise ValueError("max_epochs and n_trees must be positive")
        if self.max_depth < 0 or self.min_samples_split < 2:
            raise ValueError("max_depth must be >= 0 and min_samples_split >= 2")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be positive")


@dataclass(frozen=True)
class EvalReport:
    auc: float
    ndcg: float
    n_test: int
    model_kind: str
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "auc": self.auc, "ndcg": self.ndcg, "n_test": self.n_test,
            "model_kind": self.model_kind, "metadata": self.metadata,
        }, indent=2, sort_keys=True)


@dataclass
class _Tree:
    """Flat array-encoded binary tree; feature == _LEAF marks leaves."""

    feature: np.ndarray     # (nodes,) int
    threshold: np.ndarray   # (nodes,) float
    left: np.ndarray        # (nodes,) int
    right: np.ndarray       # (nodes,) int
    value: np.ndarray       # (nodes,) float, weighted positive fraction
    importances: np.ndarray  # (d,) raw impurity decrease


@dataclass
class TrainedModel:
    kind: str
    fingerprint: str
    n_features: int
    feature_names: tuple[str, ...] | None
    spec: ModelSpec
    # logistic regression parameters
    lr_mu: np.ndarray | None = None
    lr_sigma: np.ndarray | None = None
    lr_weights: np.ndarray | None = None
    lr_bias: float = 0.0
    # tree / forest parameters
    trees: list[_Tree] = field(default_factory=list)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

def _class_weights(y: np.ndarray, mode) -> np.ndarray:
    """Per-sample weights; 'balanced' uses inverse class frequency."""
    if mode == "none":
        return np.ones(len(y))
    if mode == "balanced":
        n_pos = float(y.sum())
        n_neg = float(len(y) - y.sum())
        w_pos = len(y) / (2.0 * n_pos)
        w_neg = len(y) / (2.0 * n_neg)
    else:
        w_neg, w_pos = float(mode[0]), float(mode[1])
    return np.where(y > 0.5, w_pos, w_neg)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _train_logistic(x: np.ndarray, y: np.ndarray, sw: np.ndarray, spec: ModelSpec):
    """Full-batch gradient descent on class-weighted, L2-regularized log-loss.

    Features are standardized with weight-aware statistics so that weighting
    a class is exactly equivalent to replicating its samples.
    """
    total = sw.sum()
    mu = (sw[:, None] * x).sum(axis=0) / total
    var = (sw[:, None] * (x - mu) ** 2).sum(axis=0) / total
    sigma = np.sqrt(var)
    sigma[sigma == 0] = 1.0
    z = (x - mu) / sigma

    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(spec.max_epochs):
        p = _sigmoid(z @ w + b)
        err = sw * (p - y)
        grad_w = z.T @ err / total + 2.0 * spec.l2 * w
        grad_b = err.sum() / total
        w -= spec.learning_rate * grad_w
        b -= spec.learning_rate * grad_b
        if max(np.abs(grad_w).max(initial=0.0), abs(grad_b)) < spec.tolerance:
            break
    return mu, sigma, w, b


def _build_tree(x: np.ndarray, y: np.ndarray, sw: np.ndarray, spec: ModelSpec,
                rng: np.random.Generator | None, features_per_split: int | None) -> _Tree:
    """Greedy CART on weighted Gini impurity.

    Candidate thresholds are midpoints of consecutive distinct sorted
    values. Ties in impurity resolve to the lowest (feature, threshold);
    when a rng is given, `features_per_split` random features (sorted) are
    candidates at each node, as in a random forest.
    """
    d = x.shape[1]
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    importances = np.zeros(d)
    w_root = sw.sum()

    def gini(wy: float, w: float) -> float:
        if w <= 0:
            return 0.0
        p = wy / w
        return 2.0 * p * (1.0 - p)

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(_LEAF)
        right.append(_LEAF)
        w_node = sw[idx].sum()
        wy_node = (sw[idx] * y[idx]).sum()
        value.append(wy_node / w_node if w_node > 0 else 0.0)

        g_node = gini(wy_node, w_node)
        if depth >= spec.max_depth or len(idx) < spec.min_samples_split or g_node <= 0.0:
            return node

        if rng is not None and features_per_split is not None and features_per_split < d:
            cand = np.sort(rng.choice(d, size=features_per_split, replace=False))
        else:
            cand = np.arange(d)

        best = None  # (impurity, feature, threshold)
        for f in cand:
            col = x[idx, f]
            order = np.argsort(col, kind="stable")
            v = col[order]
            cw = sw[idx][order]
            cwy = cw * y[idx][order]
            cum_w = np.cumsum(cw)
            cum_wy = np.cumsum(cwy)
            distinct = np.flatnonzero(v[:-1] < v[1:])
            if distinct.size == 0:
                continue
            w_l = cum_w[distinct]
            wy_l = cum_wy[distinct]
            w_r = w_node - w_l
            wy_r = wy_node - wy_l
            with np.errstate(invalid="ignore", divide="ignore"):
                p_l = np.where(w_l > 0, wy_l / np.where(w_l > 0, w_l, 1.0), 0.0)
                p_r = np.where(w_r > 0, wy_r / np.where(w_r > 0, w_r, 1.0), 0.0)
            imp = (w_l * 2.0 * p_l * (1.0 - p_l) + w_r * 2.0 * p_r * (1.0 - p_r)) / w_node
            k = int(np.argmin(imp))
            if best is None or imp[k] < best[0] - 1e-15:
                thr = (v[distinct[k]] + v[distinct[k] + 1]) / 2.0
                best = (float(imp[k]), int(f), thr)

        if best is None or best[0] >= g_node - 1e-12:
            return node

        imp_best, f_best, thr_best = best
        go_left = x[idx, f_best] <= thr_best
        idx_l, idx_r = idx[go_left], idx[~go_left]
        if idx_l.size == 0 or idx_r.size == 0:
            return node

        importances[f_best] += (w_node / w_root) * (g_node - imp_best)
        feature[node] = f_best
        threshold[node] = thr_best
        left[node] = grow(idx_l, depth + 1)
        right[node] = grow(idx_r, depth + 1)
        return node

    grow(np.arange(x.shape[0]), 0)
    return _Tree(
        feature=np.array(feature, dtype=int),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=int),
        right=np.array(right, dtype=int),
        value=np.array(value, dtype=float),
        importances=importances,
    )


def train(ds: Dataset, spec: ModelSpec) -> TrainedModel:
    """Fit one model of the requested kind on the dataset.

    Requires both classes present and finite features. Samples with clicks
    get higher weight under the default balanced class weighting.
    """
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    x = ds.matrix()
    y = ds.labels()
    if not np.isfinite(x).all():
        raise ValueError("non-finite feature values")
    if y.min() == y.max():
        raise ValueError("training data must contain both classes")
    sw = _class_weights(y, spec.class_weight)

    model = TrainedModel(
        kind=spec.kind, fingerprint=ds.fingerprint, n_features=x.shape[1],
        feature_names=ds.feature_names, spec=spec,
    )

    if spec.kind == "logistic_regression":
        model.lr_mu, model.lr_sigma, model.lr_weights, model.lr_bias = _train_logistic(x, y, sw, spec)
        return model

    if spec.kind == "decision_tree":
        model.trees = [_build_tree(x, y, sw, spec, rng=None, features_per_split=None)]
        return model

    d = x.shape[1]
    fps = spec.features_per_split
    if fps is None:
        fps = max(1, int(round(math.sqrt(d))))
    if fps > d:
        raise ValueError(f"features_per_split {fps} exceeds feature count {d}")
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.n_trees)
    for tree_seed in seeds:
        rng = np.random.default_rng(tree_seed)
        if spec.bootstrap:
            idx = rng.integers(0, len(y), size=len(y))
        else:
            idx = np.arange(len(y))
        model.trees.append(
            _build_tree(x[idx], y[idx], sw[idx], spec, rng=rng, features_per_split=fps)
        )
    return model


# ---------------------------------------------------------------------------
# prediction & ranking
# ---------------------------------------------------------------------------

def _tree_scores(tree: _Tree, x: np.ndarray) -> np.ndarray:
    node = np.zeros(len(x), dtype=int)
    while True:
        internal = tree.feature[node] != _LEAF
        if not internal.any():
            return tree.value[node]
        rows = np.flatnonzero(internal)
        feats = tree.feature[node[rows]]
        go_left = x[rows, feats] <= tree.threshold[node[rows]]
        node[rows] = np.where(go_left, tree.left[node[rows]], tree.right[node[rows]])


def predict_matrix(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    """Scores in [0, 1] for a feature matrix with the model's column layout."""
    if x.shape[1] != model.n_features:
        raise SchemaMismatchError(f"expected {model.n_features} features, got {x.shape[1]}")
    if model.kind == "logistic_regression":
        z = (x - model.lr_mu) / model.lr_sigma
        return _sigmoid(z @ model.lr_weights + model.lr_bias)
    scores = np.zeros(len(x))
    for tree in model.trees:
        scores += _tree_scores(tree, x)
    return scores / len(model.trees)


def predict_ctr(model: TrainedModel, vec: FeatureVector) -> float:
    """Predicted CTR for one banner; requires a matching schema fingerprint."""
    if vec.full_fingerprint != model.fingerprint:
        raise SchemaMismatchError(
            f"vector fingerprint {vec.full_fingerprint} != model fingerprint {model.fingerprint}"
        )
    x = np.array([vec.full_values()], dtype=float)
    return float(predict_matrix(model, x)[0])


def rank(model: TrainedModel, items: list[tuple[str, FeatureVector]]) -> list[str]:
    """Item ids by descending predicted CTR; score ties break by ascending id."""
    scored = [(predict_ctr(model, vec), item_id) for item_id, vec in items]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [item_id for _, item_id in scored]


def feature_importance(model: TrainedModel) -> list[tuple[str, float]]:
    """Per-feature importance, normalized to sum 1, sorted descending.

    Trees and forests report total Gini impurity decrease; logistic
    regression reports |weight| (its features are standardized in
    training, making magnitudes comparable).
    """
    if model.kind == "logistic_regression":
        raw = np.abs(model.lr_weights)
    else:
        raw = np.zeros(model.n_features)
        for tree in model.trees:
            raw = raw + tree.importances
    total = raw.sum()
    if total > 0:
        raw = raw / total
    names = model.feature_names or tuple(f"f{i}" for i in range(model.n_features))
    ranked = sorted(zip(names, raw.tolist()), key=lambda p: (-p[1], p[0]))
    return ranked


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score+ > score-) + 0.5 P(equal), via rank sums."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if len(s) != len(y):
        raise ValueError("scores and labels must have equal length")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=float)
    i = 0
    sorted_s = s[order]
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum_pos = ranks[np.asarray(y) == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def ndcg(predicted_scores, relevances) -> float:
    """NDCG with linear gains and log2(position + 1) discounts.

    Items are ordered by predicted score (ties keep input order); gains are
    the CTR relevances. Raises when every relevance is zero.
    """
    s = np.asarray(predicted_scores, dtype=float)
    rel = np.asarray(relevances, dtype=float)
    if len(s) != len(rel):
        raise ValueError("scores and relevances must have equal length")
    if np.any(rel < 0):
        raise ValueError("relevances must be non-negative")
    if not np.any(rel > 0):
        raise ValueError("at least one relevance must be positive")
    discounts = 1.0 / np.log2(np.arange(len(rel)) + 2.0)
    order = np.argsort(-s, kind="stable")
    dcg = float((rel[order] * discounts).sum())
    ideal = float((np.sort(rel)[::-1] * discounts).sum())
    return dcg / ideal


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform shuffle, then a disjoint, exhaustive two-way split."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = len(ds)
    n_train = int(round(n * train_fraction))
    if n_train < 1 or n_train > n - 1:
        raise ValueError(f"dataset of {n} rows cannot be split at {train_fraction}")
    idx = list(range(n))
    random.Random(seed).shuffle(idx)
    train_rows = tuple(ds.rows[i] for i in idx[:n_train])
    test_rows = tuple(ds.rows[i] for i in idx[n_train:])
    return (Dataset(rows=train_rows, feature_names=ds.feature_names),
            Dataset(rows=test_rows, feature_names=ds.feature_names))


def evaluate(model: TrainedModel, test: Dataset) -> EvalReport:
    """AUC over click labels and NDCG over CTR relevances on held-out rows."""
    if len(test) == 0:
        raise ValueError("test dataset must be non-empty")
    if test.fingerprint != model.fingerprint:
        raise SchemaMismatchError("test dataset schema does not match the model")
    scores = predict_matrix(model, test.matrix())
    return EvalReport(
        auc=auc(scores, test.labels().astype(int)),
        ndcg=ndcg(scores, test.ctrs()),
        n_test=len(test),
        model_kind=model.kind,
        metadata={"seed": model.spec.seed, "class_weight": str(model.spec.class_weight)},
    )


# ---------------------------------------------------------------------------
# persistence & CSV interchange
# ---------------------------------------------------------------------------

def model_to_json(model: TrainedModel) -> str:
    doc = {
        "kind": model.kind,
        "fingerprint": model.fingerprint,
        "n_features": model.n_features,
        "feature_names": list(model.feature_names) if model.feature_names else None,
        "spec": {
            "kind": model.spec.kind,
            "learning_rate": model.spec.learning_rate, "l2": model.spec.l2,
            "max_epochs": model.spec.max_epochs, "tolerance": model.spec.tolerance,
            "max_depth": model.spec.max_depth, "min_samples_split": model.spec.min_samples_split,
            "n_trees": model.spec.n_trees, "features_per_split": model.spec.features_per_split,
            "bootstrap": model.spec.bootstrap,
            "class_weight": list(model.spec.class_weight)
            if isinstance(model.spec.class_weight, tuple) else model.spec.class_weight,
            "seed": model.spec.seed,
        },
    }
    if model.kind == "logistic_regression":
        doc["logistic"] = {
            "mu": model.lr_mu.tolist(), "sigma": model.lr_sigma.tolist(),
            "weights": model.lr_weights.tolist(), "bias": model.lr_bias,
        }
    else:
        doc["trees"] = [{
            "feature": t.feature.tolist(), "threshold": t.threshold.tolist(),
            "left": t.left.tolist(), "right": t.right.tolist(),
            "value": t.value.tolist(), "importances": t.importances.tolist(),
        } for t in model.trees]
    return json.dumps(doc)


def model_from_json(data: bytes | str) -> TrainedModel:
    doc = json.loads(data)
    raw_spec = doc["spec"]
    cw = raw_spec["class_weight"]
    spec = ModelSpec(
        kind=raw_spec["kind"],
        learning_rate=raw_spec["learning_rate"], l2=raw_spec["l2"],
        max_epochs=raw_spec["max_epochs"], tolerance=raw_spec["tolerance"],
        max_depth=raw_spec["max_depth"], min_samples_split=raw_spec["min_samples_split"],
        n_trees=raw_spec["n_trees"], features_per_split=raw_spec["features_per_split"],
        bootstrap=raw_spec["bootstrap"],
        class_weight=tuple(cw) if isinstance(cw, list) else cw,
        seed=raw_spec["seed"],
    )
    model = TrainedModel(
        kind=doc["kind"], fingerprint=doc["fingerprint"], n_features=doc["n_features"],
        feature_names=tuple(doc["feature_names"]) if doc["feature_names"] else None,
        spec=spec,
    )
    if model.kind == "logistic_regression":
        lr = doc["logistic"]
        model.lr_mu = np.array(lr["mu"])
        model.lr_sigma = np.array(lr["sigma"])
        model.lr_weights = np.array(lr["weights"])
        model.lr_bias = float(lr["bias"])
    else:
        model.trees = [
            _Tree(
                feature=np.array(t["feature"], dtype=int),
                threshold=np.array(t["threshold"], dtype=float),
                left=np.array(t["left"], dtype=int),
                right=np.array(t["right"], dtype=int),
                value=np.array(t["value"], dtype=float),
                importances=np.array(t["importances"], dtype=float),
            )
            for t in doc["trees"]
        ]
    return model


def features_to_csv(items: list[tuple[str, FeatureVector]], feature_names: tuple[str, ...]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["banner_id", *feature_names])
    for banner_id, vec in items:
        values = vec.full_values()
        if len(values) != len(feature_names):
            raise SchemaMismatchError(
                f"{banner_id}: {len(values)} values vs {len(feature_names)} columns"
            )
        writer.writerow([banner_id, *(repr(v) for v in values)])
    return buf.getvalue()


def labels_to_csv(rows: list[tuple[str, int, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["banner_id", "is_clicked", "ctr"])
    for banner_id, is_clicked, ctr in rows:
        writer.writerow([banner_id, is_clicked, repr(ctr)])
    return buf.getvalue()


def dataset_from_csv(features_csv: bytes | str, labels_csv: bytes | str) -> Dataset:
    """Join a feature-matrix CSV and a labels CSV on banner_id.

    The schema fingerprint is derived from the feature column names, so any
    model trained from files matches any vector rebuilt from the same
    column layout.
    """
    if isinstance(features_csv, bytes):
        features_csv = features_csv.decode("utf-8")
    if isinstance(labels_csv, bytes):
        labels_csv = labels_csv.decode("utf-8")

    feat_reader = csv.reader(io.StringIO(features_csv))
    header = next(feat_reader, None)
    if not header or header[0] != "banner_id":
        raise ValueError("feature CSV must start with a banner_id column")
    names = tuple(header[1:])
    fp = fingerprint_of_names(names)
    vectors: dict[str, FeatureVector] = {}
    for line in feat_reader:
        if not line:
            continue
        vectors[line[0]] = FeatureVector(
            schema_fingerprint=fp, values=tuple(float(v) for v in line[1:])
        )

    label_reader = csv.DictReader(io.StringIO(labels_csv))
    required = {"banner_id", "is_clicked", "ctr"}
    if label_reader.fieldnames is None or not required.issubset(label_reader.fieldnames):
        raise ValueError("labels CSV must have banner_id, is_clicked, ctr columns")
    rows = []
    for entry in label_reader:
        banner_id = entry["banner_id"]
        if banner_id not in vectors:
            raise ValueError(f"label row {banner_id!r} has no feature row")
        rows.append(DataRow(
            banner_id=banner_id, features=vectors[banner_id],
            is_clicked=int(entry["is_clicked"]), ctr=float(entry["ctr"]),
        ))
    return Dataset(rows=tuple(rows), feature_names=names)


__all__ = [
    "MODEL_KINDS", "SchemaMismatchError", "fingerprint_of_names",
    "DataRow", "Dataset", "ModelSpec", "EvalReport", "TrainedModel",
    "train", "predict_matrix", "predict_ctr", "rank", "feature_importance",
    "auc", "ndcg", "split", "evaluate",
    "model_to_json", "model_from_json",
    "features_to_csv", "labels_to_csv", "dataset_from_csv",
]
