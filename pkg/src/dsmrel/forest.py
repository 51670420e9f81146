"""Random forest of depth-limited CART trees, written from scratch.

Randomness comes only from :class:`SplitMix64` streams, one per tree, seeded
with ``mix64(seed) ^ tree_index``. Bootstrap indices are drawn first, then one
feature subset per split in pre-order (left subtree before right). Given the
same data and parameters the serialised model is byte-identical, whether the
trees were grown sequentially or in parallel.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._io import atomic_write
from .exceptions import ModelFormatError
from .features import FEATURE_NAMES

MODEL_FORMAT = "dsmrel-forest"
MODEL_VERSION = 1

# gains closer than this are treated as tied
GAIN_EPS = 1e-12

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output finaliser."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Steele/Lea/Flood SplitMix64: add the golden gamma, then finalise."""

    def __init__(self, state: int):
        self.state = state & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def sample(self, population: int, k: int) -> list[int]:
        """``k`` distinct values from ``range(population)``, partial Fisher-Yates, sorted."""
        pool = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])


def tree_stream(seed: int, tree_index: int) -> SplitMix64:
    """RNG for tree ``tree_index``: SplitMix64 started at ``seed XOR tree_index``."""
    return SplitMix64(seed ^ tree_index)


def impurity(class_counts, criterion: str = "gini") -> float:
    counts = np.asarray(class_counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("impurity of an empty node is undefined")
    return float(_impurity_rows(counts[None, :], criterion)[0])


def _impurity_rows(counts: np.ndarray, criterion: str) -> np.ndarray:
    """Row-wise impurity of a (m, n_classes) array of class counts."""
    totals = counts.sum(axis=1, keepdims=True)
    p = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    if criterion == "gini":
        return 1.0 - np.sum(p * p, axis=1)
    if criterion == "entropy":
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return np.maximum(0.0, -np.sum(p * logs, axis=1))
    raise ValueError(f"unknown criterion {criterion!r}")


def _split_gains(x, onehot, parent_counts, criterion):
    """Impurity decrease for every boundary between distinct sorted values of ``x``."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    left = np.cumsum(onehot[order], axis=0)[:-1]
    boundary = xs[1:] > xs[:-1]
    if not boundary.any():
        return np.empty(0), np.empty(0)
    left = left[boundary]
    right = parent_counts[None, :] - left
    n_l, n_r = left.sum(axis=1), right.sum(axis=1)
    n = parent_counts.sum()
    parent = _impurity_rows(parent_counts[None, :], criterion)[0]
    gains = parent - (n_l / n) * _impurity_rows(left, criterion) - (n_r / n) * _impurity_rows(right, criterion)
    lo, hi = xs[:-1][boundary], xs[1:][boundary]
    thresholds = (lo + hi) / 2.0
    # adjacent floats: the midpoint can round up onto the upper value
    thresholds = np.where(thresholds >= hi, lo, thresholds)
    return thresholds, gains


def best_split(X, y, feature_subset, criterion="gini", n_classes=None, class_weights=None):
    """Best axis-aligned split of ``(X, y)`` among ``feature_subset``.

    ``y`` holds integer class codes. Candidate thresholds are midpoints between
    consecutive distinct values; samples with ``x <= threshold`` go left.
    Returns ``(feature, threshold, gain)`` or ``None`` when no split has a
    positive impurity decrease. Ties prefer the lower feature index, then the
    lower threshold.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    w = np.ones(n_classes) if class_weights is None else np.asarray(class_weights, dtype=np.float64)
    onehot = np.zeros((len(y), n_classes))
    onehot[np.arange(len(y)), y] = w[y]
    parent_counts = onehot.sum(axis=0)

    candidates = []
    for f in sorted(feature_subset):
        thresholds, gains = _split_gains(X[:, f], onehot, parent_counts, criterion)
        if gains.size:
            candidates.append((f, thresholds, gains))
    if not candidates:
        return None
    top = max(float(g.max()) for _, _, g in candidates)
    if top <= GAIN_EPS:
        return None
    for f, thresholds, gains in candidates:
        hits = np.flatnonzero(gains >= top - GAIN_EPS)
        if hits.size:
            k = hits[0]
            return int(f), float(thresholds[k]), float(gains[k])
    return None  # pragma: no cover


@dataclass
class Node:
    """Tree node; ``feature is None`` marks a leaf."""

    class_counts: list
    n_samples: int
    depth: int
    feature: int | None = None
    threshold: float | None = None
    left: "Node | None" = None
    right: "Node | None" = None
    label: int | None = None

    @property
    def is_leaf(self):
        return self.feature is None


def grow_tree(X, y, n_classes, rng: SplitMix64, max_depth=10, max_features=None,
              criterion="gini", min_split=2, class_weights=None, depth=0) -> Node:
    """Grow one CART tree on integer-coded labels, drawing feature subsets from ``rng``."""
    n_features = X.shape[1]
    k = n_features if max_features is None else max_features
    counts = np.bincount(y, minlength=n_classes)
    w = np.ones(n_classes) if class_weights is None else np.asarray(class_weights)
    node = Node(class_counts=counts.tolist(), n_samples=len(y), depth=depth,
                label=int(np.argmax(counts * w)))
    if depth >= max_depth or np.count_nonzero(counts) <= 1 or len(y) < min_split:
        return node
    subset = rng.sample(n_features, k)
    split = best_split(X, y, subset, criterion, n_classes, class_weights)
    if split is None:
        return node
    f, thr, _ = split
    go_left = X[:, f] <= thr
    kwargs = dict(max_depth=max_depth, max_features=max_features, criterion=criterion,
                  min_split=min_split, class_weights=class_weights, depth=depth + 1)
    node.feature, node.threshold = f, thr
    node.left = grow_tree(X[go_left], y[go_left], n_classes, rng, **kwargs)
    node.right = grow_tree(X[~go_left], y[~go_left], n_classes, rng, **kwargs)
    return node


def _fit_one(X, y, n_classes, seed, t, params, class_weights):
    rng = tree_stream(seed, t)
    n = len(y)
    boot = np.array([rng.randbelow(n) for _ in range(n)], dtype=np.int64)
    return grow_tree(X[boot], y[boot], n_classes, rng, class_weights=class_weights, **params)


@dataclass
class _FlatTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray

    @classmethod
    def from_node(cls, root: Node):
        feats, thrs, lefts, rights, labels = [], [], [], [], []

        def visit(node):
            i = len(feats)
            feats.append(-1 if node.is_leaf else node.feature)
            thrs.append(0.0 if node.is_leaf else node.threshold)
            lefts.append(-1)
            rights.append(-1)
            labels.append(node.label if node.is_leaf else -1)
            if not node.is_leaf:
                lefts[i] = visit(node.left)
                rights[i] = visit(node.right)
            return i

        visit(root)
        return cls(np.array(feats), np.array(thrs, dtype=np.float64), np.array(lefts),
                   np.array(rights), np.array(labels))

    def apply(self, X):
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return self.label[node]
            go_left = X[rows[active], f[active]] <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])


def tree_depth(node: Node) -> int:
    if node.is_leaf:
        return node.depth
    return max(tree_depth(node.left), tree_depth(node.right))


def iter_nodes(node: Node):
    yield node
    if not node.is_leaf:
        yield from iter_nodes(node.left)
        yield from iter_nodes(node.right)


class RandomForest(ClassifierMixin, BaseEstimator):
    """Bagged CART trees with random feature subsets and plurality voting.

    Parameters
    ----------
    n_estimators : int, default=100
    max_depth : int, default=10
        Root is depth 0; no node sits deeper than this.
    criterion : {"gini", "entropy"}, default="gini"
    max_features : int or None, default=9
        Features drawn (without replacement) for each split; ``None`` uses all.
    min_split : int, default=2
        Nodes with fewer samples become leaves.
    seed : int, default=0
    class_weight : None, "balanced" or dict, default=None
        Weights applied to class counts in impurities and leaf labels.
    n_jobs : int or None, default=None
        Trees are grown in parallel with joblib; results do not depend on it.
    """

    def __init__(self, n_estimators=100, max_depth=10, criterion="gini", max_features=9,
                 min_split=2, seed=0, class_weight=None, n_jobs=None):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.criterion = criterion
        self.max_features = max_features
        self.min_split = min_split
        self.seed = seed
        self.class_weight = class_weight
        self.n_jobs = n_jobs

    def _validate_params(self, n_features):
        if not isinstance(self.n_estimators, (int, np.integer)) or self.n_estimators < 1:
            raise ValueError(f"n_estimators must be >= 1, got {self.n_estimators!r}")
        if not isinstance(self.max_depth, (int, np.integer)) or self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth!r}")
        if self.criterion not in ("gini", "entropy"):
            raise ValueError(f"criterion must be 'gini' or 'entropy', got {self.criterion!r}")
        k = n_features if self.max_features is None else self.max_features
        if not 1 <= k <= n_features:
            raise ValueError(f"max_features must be in [1, {n_features}], got {self.max_features!r}")
        if self.min_split < 2:
            raise ValueError(f"min_split must be >= 2, got {self.min_split!r}")
        return int(k)

    def _class_weights(self, y_codes):
        if self.class_weight is None:
            return None
        n_classes = len(self.classes_)
        if self.class_weight == "balanced":
            counts = np.bincount(y_codes, minlength=n_classes)
            return (len(y_codes) / (n_classes * counts)).tolist()
        if isinstance(self.class_weight, dict):
            return [float(self.class_weight.get(c, 1.0)) for c in self.classes_]
        raise ValueError(f"unsupported class_weight {self.class_weight!r}")

    def fit(self, X, y, feature_names=None):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=False)
        k = self._validate_params(X.shape[1])
        self.classes_, y_codes = np.unique(y.astype(str), return_inverse=True)
        if len(self.classes_) < 2:
            raise ValueError("training data must contain at least two distinct labels")
        self.n_features_in_ = X.shape[1]
        if feature_names is None:
            feature_names = FEATURE_NAMES if X.shape[1] == len(FEATURE_NAMES) else \
                [f"x{i}" for i in range(X.shape[1])]
        self.feature_names_ = list(feature_names)
        self.class_weights_ = self._class_weights(y_codes)
        params = dict(max_depth=self.max_depth, max_features=k, criterion=self.criterion,
                      min_split=self.min_split)
        self.trees_ = Parallel(n_jobs=self.n_jobs)(
            delayed(_fit_one)(X, y_codes, len(self.classes_), self.seed, t, params, self.class_weights_)
            for t in range(self.n_estimators))
        self._flat = [_FlatTree.from_node(t) for t in self.trees_]
        return self

    def _check_X(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def _votes(self, X):
        X = self._check_X(X)
        votes = np.zeros((len(X), len(self.classes_)))
        rows = np.arange(len(X))
        for tree in self._flat:
            votes[rows, tree.apply(X)] += 1
        return votes

    def predict_proba(self, X):
        """Fraction of trees voting for each class (columns follow ``classes_``)."""
        return self._votes(X) / len(self._flat)

    def predict(self, X):
        votes = self._votes(X)
        # argmax takes the first maximum, i.e. the lexicographically smallest label
        return self.classes_[np.argmax(votes, axis=1)]

    @property
    def feature_importances_(self):
        check_is_fitted(self, "trees_")
        return mean_decrease_impurity(self.trees_, self.n_features_in_, self.criterion,
                                      self.class_weights_)

    def importances(self) -> dict[str, float]:
        return dict(zip(self.feature_names_, self.feature_importances_.tolist()))

    def to_dict(self) -> dict:
        check_is_fitted(self, "trees_")
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": {k: v for k, v in self.get_params().items() if k != "n_jobs"},
            "classes": [str(c) for c in self.classes_],
            "feature_names": self.feature_names_,
            "class_weights": self.class_weights_,
            "trees": [_node_to_dict(t, self.classes_) for t in self.trees_],
        }

    @classmethod
    def from_dict(cls, doc) -> "RandomForest":
        try:
            if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
                raise ModelFormatError(
                    f"unsupported model format {doc.get('format')!r} version {doc.get('version')!r}")
            params = doc["params"]
            if isinstance(params.get("class_weight"), dict):
                params = {**params, "class_weight": dict(params["class_weight"])}
            forest = cls(**params)
            forest.classes_ = np.array(doc["classes"])
            forest.feature_names_ = list(doc["feature_names"])
            forest.n_features_in_ = len(forest.feature_names_)
            forest.class_weights_ = doc["class_weights"]
            index = {c: i for i, c in enumerate(doc["classes"])}
            forest.trees_ = [_node_from_dict(t, index, 0) for t in doc["trees"]]
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"malformed model document: {exc!r}") from exc
        if len(forest.trees_) != forest.n_estimators:
            raise ModelFormatError("tree count disagrees with n_estimators")
        forest._flat = [_FlatTree.from_node(t) for t in forest.trees_]
        return forest


def mean_decrease_impurity(trees, n_features, criterion="gini", class_weights=None) -> np.ndarray:
    """Per-tree weighted impurity decreases, normalised per tree, averaged, renormalised."""
    total = np.zeros(n_features)
    for root in trees:
        imp = np.zeros(n_features)
        w = np.ones(len(root.class_counts)) if class_weights is None else np.asarray(class_weights)
        n_root = float(np.dot(root.class_counts, w))
        for node in iter_nodes(root):
            if node.is_leaf:
                continue
            n = np.dot(node.class_counts, w)
            n_l = np.dot(node.left.class_counts, w)
            n_r = np.dot(node.right.class_counts, w)
            delta = (impurity(np.multiply(node.class_counts, w), criterion)
                     - n_l / n * impurity(np.multiply(node.left.class_counts, w), criterion)
                     - n_r / n * impurity(np.multiply(node.right.class_counts, w), criterion))
            imp[node.feature] += n / n_root * delta
        if imp.sum() > 0:
            total += imp / imp.sum()
    s = total.sum()
    return total / s if s > 0 else total


def _node_to_dict(node: Node, classes) -> dict:
    d = {"n_samples": node.n_samples, "class_counts": list(node.class_counts)}
    if node.is_leaf:
        d["label"] = str(classes[node.label])
    else:
        d["feature"] = node.feature
        d["threshold"] = node.threshold
        d["left"] = _node_to_dict(node.left, classes)
        d["right"] = _node_to_dict(node.right, classes)
    return d


def _node_from_dict(d, index, depth) -> Node:
    counts = [int(c) for c in d["class_counts"]]
    if len(counts) != len(index):
        raise ModelFormatError("class_counts length disagrees with classes")
    if "feature" in d:
        node = Node(counts, int(d["n_samples"]), depth, feature=int(d["feature"]),
                    threshold=float(d["threshold"]))
        node.left = _node_from_dict(d["left"], index, depth + 1)
        node.right = _node_from_dict(d["right"], index, depth + 1)
        return node
    return Node(counts, int(d["n_samples"]), depth, label=index[d["label"]])


def _dumps(obj) -> str:
    """Compact JSON with floats at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in model")
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def save_model(forest: RandomForest, path) -> None:
    doc = forest.to_dict()
    trees = doc.pop("trees")
    with atomic_write(path) as fh:
        # one tree per line keeps diffs of golden models readable
        body = _dumps(doc)[:-1]
        fh.write(body + ',"trees":[\n')
        fh.write(",\n".join(_dumps(t) for t in trees))
        fh.write("\n]}\n")


def load_model(path) -> RandomForest:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not a valid model document ({exc})") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: model document must be a JSON object")
    return RandomForest.from_dict(doc)


def train_forest(rows, **params) -> RandomForest:
    """Fit a forest on labelled ``(WordPair, PairFeatures)`` rows."""
    from .features import to_arrays

    if not rows:
        raise ValueError("cannot train on an empty dataset")
    X, y = to_arrays(rows)
    if any(label is None for label in y):
        raise ValueError("training rows must be labelled")
    return RandomForest(**params).fit(X, y)


def predict(forest: RandomForest, features) -> tuple[str, dict[str, float]]:
    """Label and vote distribution for one feature vector."""
    values = np.asarray(getattr(features, "values", features), dtype=np.float64)
    if values.shape != (forest.n_features_in_,):
        raise ValueError(f"expected {forest.n_features_in_} features, got shape {values.shape}")
    proba = forest.predict_proba(values[None, :])[0]
    label = forest.classes_[int(np.argmax(proba))]
    return str(label), {str(c): float(p) for c, p in zip(forest.classes_, proba)}
