"""Shared classifier contract for the surrogate labeler zoo.

Every trained model exposes per-class probability vectors; the base class
owns input validation and the normalization guarantee (entries in [0, 1],
sum 1 within 1e-9) so family implementations only produce raw scores.
"""

from __future__ import annotations

import numpy as np

from ..encoding import EncodedVector
from ..errors import DataError, TrainingError


def as_matrix(x) -> np.ndarray:
    if isinstance(x, EncodedVector):
        x = x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        return arr[None, :]
    return arr


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    out = np.zeros((len(labels), num_classes), dtype=np.float64)
    out[np.arange(len(labels)), labels] = 1.0
    return out


def check_training_data(X: np.ndarray, y: np.ndarray, num_classes: int) -> None:
    if len(X) < 2:
        raise TrainingError("training requires at least 2 rows")
    present = np.unique(y)
    if len(present) < 2:
        raise TrainingError("training data contains a single class")
    if num_classes < 2:
        raise TrainingError("need at least 2 classes")


class TrainedLabeler:
    """A fitted classifier over the encoded feature space."""

    def __init__(self, spec, input_dim: int, num_classes: int):
        self.spec = spec
        self.input_dim = int(input_dim)
        self.num_classes = int(num_classes)

    def _raw_proba(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def predict_proba_matrix(self, X) -> np.ndarray:
        X = as_matrix(X)
        if X.shape[1] != self.input_dim:
            raise DataError(f"input dim {X.shape[1]} != training dim {self.input_dim}")
        probs = self._raw_proba(X)
        probs = np.clip(probs, 0.0, None)
        totals = probs.sum(axis=1, keepdims=True)
        # degenerate all-zero scores fall back to uniform
        bad = totals[:, 0] <= 0
        if bad.any():
            probs[bad] = 1.0
            totals = probs.sum(axis=1, keepdims=True)
        return probs / totals

    def predict_proba(self, x) -> np.ndarray:
        return self.predict_proba_matrix(x)[0]

    def predict_matrix(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba_matrix(X), axis=1)

    def accuracy(self, X, y) -> float:
        preds = self.predict_matrix(X)
        return float(np.mean(preds == np.asarray(y)))

    # family implementations override these two for persistence
    def params_to_dict(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def params_from_dict(self, data: dict) -> None:  # pragma: no cover - abstract
        raise NotImplementedError
