"""CART decision trees and bagged random forests."""

from __future__ import annotations

import numpy as np

from .base import TrainedLabeler


def _gini(counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    # counts: (..., C), totals: (...,) row sums
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / totals[..., None]
        g = 1.0 - np.sum(p * p, axis=-1)
    return np.where(totals > 0, g, 0.0)


def _entropy(counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / totals[..., None]
        logp = np.where(p > 0, np.log2(np.clip(p, 1e-300, None)), 0.0)
        h = -np.sum(p * logp, axis=-1)
    return np.where(totals > 0, h, 0.0)


_IMPURITY = {"gini": _gini, "entropy": _entropy}


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "counts")

    def __init__(self, feature=None, threshold=None, left=None, right=None, counts=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.counts = counts

    @property
    def is_leaf(self) -> bool:
        return self.counts is not None


def _best_split(X, y, idx, features, num_classes, impurity):
    """Best (feature, threshold, score) over candidate features, or None.

    Thresholds are midpoints between consecutive distinct values; ties keep
    the first candidate in feature order for determinism.
    """
    best = None
    n = len(idx)
    y_node = y[idx]
    for f in features:
        values = X[idx, f]
        order = np.argsort(values, kind="stable")
        v_sorted = values[order]
        boundaries = np.flatnonzero(v_sorted[:-1] < v_sorted[1:])
        if len(boundaries) == 0:
            continue
        onehot = np.zeros((n, num_classes))
        onehot[np.arange(n), y_node[order]] = 1.0
        prefix = np.cumsum(onehot, axis=0)
        left_counts = prefix[boundaries]
        left_totals = left_counts.sum(axis=1)
        right_counts = prefix[-1] - left_counts
        right_totals = n - left_totals
        score = (
            left_totals * impurity(left_counts, left_totals)
            + right_totals * impurity(right_counts, right_totals)
        ) / n
        b = int(np.argmin(score))
        if best is None or score[b] < best[2] - 1e-15:
            threshold = 0.5 * (v_sorted[boundaries[b]] + v_sorted[boundaries[b] + 1])
            best = (f, float(threshold), float(score[b]))
    return best


def _build_tree(X, y, idx, num_classes, criterion, max_depth, min_samples_split,
                depth=0, rng=None, max_features=None):
    counts = np.bincount(y[idx], minlength=num_classes).astype(np.float64)
    pure = np.count_nonzero(counts) <= 1
    if pure or len(idx) < min_samples_split or (max_depth is not None and depth >= max_depth):
        return _Node(counts=counts)
    if max_features is not None and rng is not None:
        chosen = rng.choice(X.shape[1], size=min(max_features, X.shape[1]), replace=False)
        features = np.sort(chosen)
    else:
        features = np.arange(X.shape[1])
    split = _best_split(X, y, idx, features, num_classes, _IMPURITY[criterion])
    if split is None:
        return _Node(counts=counts)
    f, threshold, _ = split
    mask = X[idx, f] <= threshold
    left_idx, right_idx = idx[mask], idx[~mask]
    if len(left_idx) == 0 or len(right_idx) == 0:
        return _Node(counts=counts)
    left = _build_tree(X, y, left_idx, num_classes, criterion, max_depth,
                       min_samples_split, depth + 1, rng, max_features)
    right = _build_tree(X, y, right_idx, num_classes, criterion, max_depth,
                        min_samples_split, depth + 1, rng, max_features)
    return _Node(feature=f, threshold=threshold, left=left, right=right)


def _tree_proba(node: _Node, X: np.ndarray, idx: np.ndarray, out: np.ndarray, smoothing: float):
    if node.is_leaf:
        counts = node.counts + smoothing
        out[idx] = counts / counts.sum()
        return
    mask = X[idx, node.feature] <= node.threshold
    if mask.any():
        _tree_proba(node.left, X, idx[mask], out, smoothing)
    if (~mask).any():
        _tree_proba(node.right, X, idx[~mask], out, smoothing)


def _node_to_dict(node: _Node) -> dict:
    if node.is_leaf:
        return {"counts": node.counts.tolist()}
    return {
        "feature": int(node.feature),
        "threshold": float(node.threshold),
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> _Node:
    if "counts" in data:
        return _Node(counts=np.asarray(data["counts"], dtype=np.float64))
    return _Node(
        feature=data["feature"],
        threshold=data["threshold"],
        left=_node_from_dict(data["left"]),
        right=_node_from_dict(data["right"]),
    )


class DecisionTreeClassifier(TrainedLabeler):
    def __init__(self, spec, input_dim, num_classes, criterion, max_depth,
                 min_samples_split, leaf_smoothing):
        super().__init__(spec, input_dim, num_classes)
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_samples_split = int(min_samples_split)
        self.leaf_smoothing = float(leaf_smoothing)
        self.root: _Node | None = None

    def fit(self, X, y):
        idx = np.arange(len(X))
        self.root = _build_tree(X, y, idx, self.num_classes, self.criterion,
                                self.max_depth, self.min_samples_split)
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros((len(X), self.num_classes))
        _tree_proba(self.root, X, np.arange(len(X)), out, self.leaf_smoothing)
        return out

    def params_to_dict(self) -> dict:
        return {"root": _node_to_dict(self.root)}

    def params_from_dict(self, data: dict) -> None:
        self.root = _node_from_dict(data["root"])


class RandomForestClassifier(TrainedLabeler):
    """Bootstrap-bagged trees with sqrt(D) feature subsampling per split."""

    def __init__(self, spec, input_dim, num_classes, criterion, n_trees, max_depth,
                 min_samples_split, leaf_smoothing):
        super().__init__(spec, input_dim, num_classes)
        self.criterion = criterion
        self.n_trees = int(n_trees)
        self.max_depth = max_depth
        self.min_samples_split = int(min_samples_split)
        self.leaf_smoothing = float(leaf_smoothing)
        self.roots: list[_Node] = []

    def fit(self, X, y, rng: np.random.Generator):
        n = len(X)
        max_features = max(1, int(np.sqrt(X.shape[1])))
        self.roots = []
        for _ in range(self.n_trees):
            sample = rng.integers(0, n, size=n)
            self.roots.append(
                _build_tree(X, y, sample, self.num_classes, self.criterion,
                            self.max_depth, self.min_samples_split,
                            rng=rng, max_features=max_features)
            )
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        total = np.zeros((len(X), self.num_classes))
        buf = np.zeros_like(total)
        for root in self.roots:
            buf[:] = 0.0
            _tree_proba(root, X, np.arange(len(X)), buf, self.leaf_smoothing)
            total += buf
        return total / len(self.roots)

    def params_to_dict(self) -> dict:
        return {"roots": [_node_to_dict(r) for r in self.roots]}

    def params_from_dict(self, data: dict) -> None:
        self.roots = [_node_from_dict(r) for r in data["roots"]]
