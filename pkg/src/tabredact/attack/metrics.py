"""Evaluation metrics, reported as percentages in [0, 100]."""

from __future__ import annotations

import numpy as np

from ..errors import DataError


def _ranks_with_ties(values: np.ndarray) -> np.ndarray:
    """1-based ranks, ties get the average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(pos_scores, neg_scores) -> float:
    """Probability (in percent) that a positive outranks a negative; ties count half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if len(pos) == 0 or len(neg) == 0:
        raise DataError("AUC needs non-empty score pools")
    combined = np.concatenate([pos, neg])
    ranks = _ranks_with_ties(combined)
    rank_sum = float(ranks[: len(pos)].sum())
    auc = (rank_sum - len(pos) * (len(pos) + 1) / 2.0) / (len(pos) * len(neg))
    return 100.0 * auc


def f1_binary(y_true, y_pred) -> float:
    """F1 (percent) of the positive class (label 1)."""
    t = np.asarray(y_true).astype(int)
    p = np.asarray(y_pred).astype(int)
    tp = int(np.sum((t == 1) & (p == 1)))
    fp = int(np.sum((t == 0) & (p == 1)))
    fn = int(np.sum((t == 1) & (p == 0)))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 100.0 * 2 * tp / denom


def accuracy_pct(y_true, y_pred) -> float:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if len(t) == 0:
        raise DataError("accuracy over an empty set")
    return 100.0 * float(np.mean(t == p))


def mean_confidence_pct(probs: np.ndarray, labels) -> float:
    """Mean probability mass assigned to the true class, in percent."""
    labels = np.asarray(labels)
    return 100.0 * float(np.mean(probs[np.arange(len(labels)), labels]))
