"""Instance-based and generative baselines: k-NN and Gaussian naive Bayes."""

from __future__ import annotations

import numpy as np

from .base import TrainedLabeler


class KNNClassifier(TrainedLabeler):
    """Brute-force k nearest neighbors; probabilities are neighbor class fractions.

    Distance ties resolve by ascending training-row index.
    """

    def __init__(self, spec, input_dim, num_classes, k):
        super().__init__(spec, input_dim, num_classes)
        self.k = int(k)
        self.X = np.zeros((0, input_dim))
        self.y = np.zeros(0, dtype=np.int64)

    def fit(self, X, y):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        n_train = len(self.X)
        k = min(self.k, n_train)
        out = np.zeros((len(X), self.num_classes))
        train_sq = np.einsum("ij,ij->i", self.X, self.X)
        chunk = max(1, int(2e7 / max(n_train, 1)))
        for start in range(0, len(X), chunk):
            Q = X[start : start + chunk]
            d = train_sq[None, :] - 2.0 * (Q @ self.X.T)
            neighbors = np.argsort(d, axis=1, kind="stable")[:, :k]
            votes = self.y[neighbors]
            for c in range(self.num_classes):
                out[start : start + chunk, c] = (votes == c).sum(axis=1)
        return out / k

    def params_to_dict(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist()}

    def params_from_dict(self, data: dict) -> None:
        self.X = np.asarray(data["X"], dtype=np.float64)
        self.y = np.asarray(data["y"], dtype=np.int64)


class GaussianNBClassifier(TrainedLabeler):
    def __init__(self, spec, input_dim, num_classes, var_smoothing=1e-9):
        super().__init__(spec, input_dim, num_classes)
        self.var_smoothing = float(var_smoothing)
        self.theta = np.zeros((num_classes, input_dim))
        self.var = np.ones((num_classes, input_dim))
        self.log_prior = np.full(num_classes, -np.log(num_classes))

    def fit(self, X, y):
        n = len(X)
        eps = self.var_smoothing * float(np.var(X, axis=0).max() or 1.0)
        counts = np.bincount(y, minlength=self.num_classes).astype(np.float64)
        for c in range(self.num_classes):
            Xc = X[y == c]
            if len(Xc) == 0:
                continue
            self.theta[c] = Xc.mean(axis=0)
            self.var[c] = Xc.var(axis=0) + eps
        present = counts > 0
        self.log_prior = np.where(present, np.log(np.clip(counts, 1, None) / n), -np.inf)
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        ll = np.zeros((len(X), self.num_classes))
        for c in range(self.num_classes):
            diff = X - self.theta[c]
            ll[:, c] = self.log_prior[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.var[c]) + diff * diff / self.var[c], axis=1
            )
        z = ll - ll.max(axis=1, keepdims=True)
        return np.exp(z)

    def params_to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "var": self.var.tolist(),
            "log_prior": self.log_prior.tolist(),
        }

    def params_from_dict(self, data: dict) -> None:
        self.theta = np.asarray(data["theta"], dtype=np.float64)
        self.var = np.asarray(data["var"], dtype=np.float64)
        self.log_prior = np.asarray(data["log_prior"], dtype=np.float64)
