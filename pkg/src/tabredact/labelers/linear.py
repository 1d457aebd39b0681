"""Linear models: multinomial logistic regression and hinge-loss linear SVM.

Both train by minibatch Adam. The SVM maps margin scores to probabilities
with per-class sigmoid calibration fitted on the training scores.
"""

from __future__ import annotations

import numpy as np

from .base import TrainedLabeler, one_hot, softmax

_EPS = 1e-8


class _AdamState:
    def __init__(self, shapes):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def update(self, params, grads, lr, beta1=0.9, beta2=0.999):
        self.t += 1
        corr1 = 1.0 - beta1**self.t
        corr2 = 1.0 - beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= beta1
            m += (1 - beta1) * g
            v *= beta2
            v += (1 - beta2) * g * g
            p -= lr * (m / corr1) / (np.sqrt(v / corr2) + _EPS)


class LogisticRegressionClassifier(TrainedLabeler):
    def __init__(self, spec, input_dim, num_classes, l2=0.0):
        super().__init__(spec, input_dim, num_classes)
        self.l2 = float(l2)
        self.W = np.zeros((input_dim, num_classes))
        self.b = np.zeros(num_classes)

    def fit(self, X, y, learning_rate, epochs, batch_size, rng: np.random.Generator):
        n = len(X)
        Y = one_hot(y, self.num_classes)
        batch = min(int(batch_size), n) if batch_size else n
        adam = _AdamState([self.W.shape, self.b.shape])
        for _ in range(int(epochs)):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                idx = order[start : start + batch]
                P = softmax(X[idx] @ self.W + self.b)
                delta = (P - Y[idx]) / len(idx)
                gW = X[idx].T @ delta + self.l2 * self.W
                gb = delta.sum(axis=0)
                adam.update([self.W, self.b], [gW, gb], learning_rate)
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(X @ self.W + self.b)

    def params_to_dict(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist()}

    def params_from_dict(self, data: dict) -> None:
        self.W = np.asarray(data["W"], dtype=np.float64)
        self.b = np.asarray(data["b"], dtype=np.float64)


def platt_calibrate(scores: np.ndarray, targets: np.ndarray, max_iter: int = 100):
    """Fit sigma(A*s + B) to binary targets by Newton steps on cross-entropy.

    Uses the standard smoothed targets so the fit stays proper when one side
    is scarce. Returns (A, B).
    """
    n1 = float(targets.sum())
    n0 = float(len(targets) - n1)
    hi = (n1 + 1.0) / (n1 + 2.0)
    lo = 1.0 / (n0 + 2.0)
    t = np.where(targets > 0, hi, lo)
    A, B = 0.0, float(np.log((n0 + 1.0) / (n1 + 1.0)))
    for _ in range(max_iter):
        z = A * scores + B
        p = 1.0 / (1.0 + np.exp(-z))
        g = p - t
        gA = float(np.sum(g * scores))
        gB = float(np.sum(g))
        w = p * (1.0 - p)
        hAA = float(np.sum(w * scores * scores)) + 1e-12
        hAB = float(np.sum(w * scores))
        hBB = float(np.sum(w)) + 1e-12
        det = hAA * hBB - hAB * hAB
        if abs(det) < 1e-18:
            break
        dA = (hBB * gA - hAB * gB) / det
        dB = (hAA * gB - hAB * gA) / det
        A -= dA
        B -= dB
        if abs(dA) < 1e-10 and abs(dB) < 1e-10:
            break
    return A, B


class LinearSVMClassifier(TrainedLabeler):
    """One-vs-rest hinge loss; probabilities from calibrated sigmoids."""

    def __init__(self, spec, input_dim, num_classes, l2=1e-4):
        super().__init__(spec, input_dim, num_classes)
        self.l2 = float(l2)
        self.W = np.zeros((input_dim, num_classes))
        self.b = np.zeros(num_classes)
        self.calib = np.zeros((num_classes, 2))  # (A, B) per class

    def fit(self, X, y, learning_rate, epochs, batch_size, rng: np.random.Generator):
        n = len(X)
        signs = np.where(one_hot(y, self.num_classes) > 0, 1.0, -1.0)
        batch = min(int(batch_size), n) if batch_size else n
        adam = _AdamState([self.W.shape, self.b.shape])
        for _ in range(int(epochs)):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                idx = order[start : start + batch]
                margins = X[idx] @ self.W + self.b
                active = (signs[idx] * margins < 1.0).astype(np.float64)
                coef = -signs[idx] * active / len(idx)
                gW = X[idx].T @ coef + self.l2 * self.W
                gb = coef.sum(axis=0)
                adam.update([self.W, self.b], [gW, gb], learning_rate)
        scores = X @ self.W + self.b
        for c in range(self.num_classes):
            self.calib[c] = platt_calibrate(scores[:, c], (y == c).astype(np.float64))
        return self

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:
        scores = X @ self.W + self.b
        z = self.calib[:, 0][None, :] * scores + self.calib[:, 1][None, :]
        p = 1.0 / (1.0 + np.exp(-z))
        return p  # base class normalizes across classes

    def params_to_dict(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist(), "calib": self.calib.tolist()}

    def params_from_dict(self, data: dict) -> None:
        self.W = np.asarray(data["W"], dtype=np.float64)
        self.b = np.asarray(data["b"], dtype=np.float64)
        self.calib = np.asarray(data["calib"], dtype=np.float64)
