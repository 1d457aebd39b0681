"""Boosted decision stumps: multiclass AdaBoost and softmax gradient boosting."""

from __future__ import annotations

import numpy as np

from .base import TrainedLabeler, one_hot, softmax

_ERR_FLOOR = 1e-10


def _fit_weighted_stump(X: np.ndarray, y: np.ndarray, w: np.ndarray, num_classes: int):
    """Depth-1 classifier maximizing weighted accuracy.

    Returns (feature, threshold, left_class, right_class). With no valid
    split anywhere, a degenerate stump predicting the weighted majority on
    both sides is returned.
    """
    n, d = X.shape
    best = None
    for f in range(d):
        order = np.argsort(X[:, f], kind="stable")
        v = X[order, f]
        boundaries = np.flatnonzero(v[:-1] < v[1:])
        if len(boundaries) == 0:
            continue
        wy = np.zeros((n, num_classes))
        wy[np.arange(n), y[order]] = w[order]
        prefix = np.cumsum(wy, axis=0)
        left = prefix[boundaries]
        right = prefix[-1] - left
        correct = left.max(axis=1) + right.max(axis=1)
        b = int(np.argmax(correct))
        if best is None or correct[b] > best[0] + 1e-15:
            threshold = 0.5 * (v[boundaries[b]] + v[boundaries[b] + 1])
            best = (
                float(correct[b]),
                f,
                float(threshold),
                int(np.argmax(left[b])),
                int(np.argmax(right[b])),
            )
    if best is None:
        totals = np.bincount(y, weights=w, minlength=num_classes)
        majority = int(np.argmax(totals))
        return 0, np.inf, majority, majority
    return best[1], best[2], best[3], best[4]


def _stump_predict(X, feature, threshold, left_class, right_class):
    return np.where(X[:, feature] <= threshold, left_class, right_class)


class AdaBoostStumps(TrainedLabeler):
    """SAMME boosting of depth-1 stumps; probabilities are weighted vote shares."""

    def __init__(self, spec, input_dim, num_classes, n_rounds):
        super().__init__(spec, input_dim, num_classes)
        self.n_rounds = int(n_rounds)
        self.stumps: list[tuple[int, float, int, int]] = []
        self.alphas: list[float] = []

    def fit(self, X, y):
        n = len(X)
        C = self.num_classes
        w = np.full(n, 1.0 / n)
        self.stumps, self.alphas = [], []
        for _ in range(self.n_rounds):
            stump = _fit_weighted_stump(X, y, w, C)
            pred = _stump_predict(X, *stump)
            miss = pred != y
            err = float(w[miss].sum())
            if err >= 1.0 - 1.0 / C:
                if not self.stumps:  # keep one stump so the model is usable
                    self.stumps.append(stump)
                    self.alphas.append(1.0)
                break
            alpha = float(np.log((1.0 - err) / max(err, _ERR_FLOOR)) + np.log(C - 1.0))
            self.stumps.append(stump)
            self.alphas.append(alpha)
            if err <= _ERR_FLOOR:
                break
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        return self

    def _scores(self, X: np.ndarray) -> np.ndarray:
        scores = np.zeros((len(X), self.num_classes))
        for stump, alpha in zip(self.stumps, self.alphas):
            pred = _stump_predict(X, *stump)
            scores[np.arange(len(X)), pred] += alpha
        return scores

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        return self._scores(X)  # base class normalizes vote shares

    def staged_training_errors(self, X, y) -> list[float]:
        """Ensemble training error after each boosting round."""
        scores = np.zeros((len(X), self.num_classes))
        errors = []
        for stump, alpha in zip(self.stumps, self.alphas):
            pred = _stump_predict(X, *stump)
            scores[np.arange(len(X)), pred] += alpha
            errors.append(float(np.mean(np.argmax(scores, axis=1) != y)))
        return errors

    def params_to_dict(self) -> dict:
        return {
            "stumps": [[f, t, lc, rc] for f, t, lc, rc in self.stumps],
            "alphas": list(self.alphas),
        }

    def params_from_dict(self, data: dict) -> None:
        self.stumps = [(int(f), float(t), int(lc), int(rc)) for f, t, lc, rc in data["stumps"]]
        self.alphas = [float(a) for a in data["alphas"]]


def _fit_regression_stump(X: np.ndarray, r: np.ndarray):
    """Depth-1 SSE-minimizing regressor; returns (feature, threshold, lv, rv)."""
    n, d = X.shape
    total = r.sum()
    best = None
    for f in range(d):
        order = np.argsort(X[:, f], kind="stable")
        v = X[order, f]
        boundaries = np.flatnonzero(v[:-1] < v[1:])
        if len(boundaries) == 0:
            continue
        prefix = np.cumsum(r[order])
        nl = boundaries + 1.0
        nr = n - nl
        sl = prefix[boundaries]
        sr = total - sl
        gain = sl * sl / nl + sr * sr / nr
        b = int(np.argmax(gain))
        if best is None or gain[b] > best[0] + 1e-15:
            threshold = 0.5 * (v[boundaries[b]] + v[boundaries[b] + 1])
            best = (float(gain[b]), f, float(threshold), float(sl[b] / nl[b]), float(sr[b] / nr[b]))
    if best is None:
        return 0, np.inf, float(total / n), float(total / n)
    return best[1], best[2], best[3], best[4]


class GradientBoostStumps(TrainedLabeler):
    """Softmax gradient boosting with one regression stump per class per round."""

    def __init__(self, spec, input_dim, num_classes, n_rounds, learning_rate):
        super().__init__(spec, input_dim, num_classes)
        self.n_rounds = int(n_rounds)
        self.learning_rate = float(learning_rate)
        self.rounds: list[list[tuple[int, float, float, float]]] = []

    def fit(self, X, y):
        n = len(X)
        C = self.num_classes
        Y = one_hot(y, C)
        F = np.zeros((n, C))
        self.rounds = []
        for _ in range(self.n_rounds):
            P = softmax(F)
            residual = Y - P
            round_stumps = []
            for c in range(C):
                stump = _fit_regression_stump(X, residual[:, c])
                round_stumps.append(stump)
                f, t, lv, rv = stump
                F[:, c] += self.learning_rate * np.where(X[:, f] <= t, lv, rv)
            self.rounds.append(round_stumps)
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        F = np.zeros((len(X), self.num_classes))
        for round_stumps in self.rounds:
            for c, (f, t, lv, rv) in enumerate(round_stumps):
                F[:, c] += self.learning_rate * np.where(X[:, f] <= t, lv, rv)
        return softmax(F)

    def params_to_dict(self) -> dict:
        return {"rounds": [[[f, t, lv, rv] for f, t, lv, rv in rs] for rs in self.rounds]}

    def params_from_dict(self, data: dict) -> None:
        self.rounds = [
            [(int(f), float(t), float(lv), float(rv)) for f, t, lv, rv in rs]
            for rs in data["rounds"]
        ]
