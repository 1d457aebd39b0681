"""Training dispatch, stratified cross-validation, and top-k zoo selection."""

from __future__ import annotations

import numpy as np

from ..dataset import TabularDataset
from ..encoding import encoded_matrix
from ..errors import TrainingError
from .base import TrainedLabeler, check_training_data
from .boosting import AdaBoostStumps, GradientBoostStumps
from .linear import LinearSVMClassifier, LogisticRegressionClassifier
from .mlp import MLPClassifier
from .simple import GaussianNBClassifier, KNNClassifier
from .specs import LabelerFamily, LabelerSpec
from .trees import DecisionTreeClassifier, RandomForestClassifier


def make_model(spec: LabelerSpec, input_dim: int, num_classes: int) -> TrainedLabeler:
    """Instantiate the (untrained) model for a spec."""
    p = spec.resolved_params()
    fam = spec.family
    if fam is LabelerFamily.MLP:
        return MLPClassifier(spec, input_dim, num_classes, p["hidden"], p["activation"])
    if fam is LabelerFamily.DECISION_TREE:
        return DecisionTreeClassifier(
            spec, input_dim, num_classes, p["criterion"], p["max_depth"],
            p["min_samples_split"], p["leaf_smoothing"])
    if fam is LabelerFamily.RANDOM_FOREST:
        return RandomForestClassifier(
            spec, input_dim, num_classes, p["criterion"], p["n_trees"], p["max_depth"],
            p["min_samples_split"], p["leaf_smoothing"])
    if fam is LabelerFamily.LOGISTIC_REGRESSION:
        return LogisticRegressionClassifier(spec, input_dim, num_classes, p["l2"])
    if fam is LabelerFamily.LINEAR_SVM:
        return LinearSVMClassifier(spec, input_dim, num_classes, p["l2"])
    if fam is LabelerFamily.ADABOOST_STUMPS:
        return AdaBoostStumps(spec, input_dim, num_classes, p["n_rounds"])
    if fam is LabelerFamily.GRADIENT_BOOST_STUMPS:
        return GradientBoostStumps(spec, input_dim, num_classes, p["n_rounds"], p["learning_rate"])
    if fam is LabelerFamily.KNN:
        return KNNClassifier(spec, input_dim, num_classes, p["k"])
    if fam is LabelerFamily.NAIVE_BAYES:
        return GaussianNBClassifier(spec, input_dim, num_classes, p["var_smoothing"])
    raise TrainingError(f"unknown family {fam!r}")


def train_arrays(spec: LabelerSpec, X: np.ndarray, y: np.ndarray, num_classes: int) -> TrainedLabeler:
    """Train on pre-encoded arrays. Deterministic given (spec, data)."""
    spec.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    check_training_data(X, y, num_classes)
    p = spec.resolved_params()
    model = make_model(spec, X.shape[1], num_classes)
    rng = np.random.default_rng(spec.seed)
    fam = spec.family
    if fam is LabelerFamily.MLP:
        model.fit(X, y, p["learning_rate"], p["epochs"], p["batch_size"], rng)
    elif fam in (LabelerFamily.LOGISTIC_REGRESSION, LabelerFamily.LINEAR_SVM):
        model.fit(X, y, p["learning_rate"], p["epochs"], p["batch_size"], rng)
    elif fam is LabelerFamily.RANDOM_FOREST:
        model.fit(X, y, rng)
    elif fam is LabelerFamily.KNN:
        if p["k"] > len(X):
            raise TrainingError(f"spec {spec.name!r}: k={p['k']} exceeds training size {len(X)}")
        model.fit(X, y)
    else:
        model.fit(X, y)
    return model


def train(spec: LabelerSpec, data: TabularDataset) -> TrainedLabeler:
    return train_arrays(spec, encoded_matrix(data), data.require_labels(),
                        data.schema.num_classes)


def stratified_folds(y: np.ndarray, folds: int, fold_seed: int = 0) -> list[np.ndarray]:
    """Deterministic stratified fold assignment (seeded per-class shuffle)."""
    if folds < 2:
        raise TrainingError("folds must be >= 2")
    y = np.asarray(y)
    rng = np.random.default_rng(fold_seed)
    assignment = np.zeros(len(y), dtype=np.int64)
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if len(idx) < folds:
            raise TrainingError(f"class {int(c)} has {len(idx)} rows, fewer than {folds} folds")
        idx = idx[rng.permutation(len(idx))]
        assignment[idx] = np.arange(len(idx)) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def cross_val_accuracy_arrays(
    spec: LabelerSpec, X: np.ndarray, y: np.ndarray, num_classes: int,
    folds: int, fold_seed: int = 0,
) -> float:
    """Mean held-out accuracy over stratified folds."""
    fold_idx = stratified_folds(y, folds, fold_seed)
    scores = []
    for f, held_out in enumerate(fold_idx):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[held_out] = False
        model = train_arrays(spec, X[train_mask], y[train_mask], num_classes)
        scores.append(model.accuracy(X[held_out], y[held_out]))
    return float(np.mean(scores))


def cross_val_accuracy(spec: LabelerSpec, data: TabularDataset, folds: int,
                       fold_seed: int = 0) -> float:
    return cross_val_accuracy_arrays(
        spec, encoded_matrix(data), data.require_labels(), data.schema.num_classes,
        folds, fold_seed)


def rank_specs_arrays(
    specs: list[LabelerSpec], X: np.ndarray, y: np.ndarray, num_classes: int,
    folds: int, fold_seed: int = 0,
) -> list[tuple[LabelerSpec, float]]:
    """Specs with CV scores, sorted by descending accuracy (ties keep spec order)."""
    scored = [
        (spec, cross_val_accuracy_arrays(spec, X, y, num_classes, folds, fold_seed))
        for spec in specs
    ]
    order = sorted(range(len(scored)), key=lambda i: (-scored[i][1], i))
    return [scored[i] for i in order]


def select_top_k(
    specs: list[LabelerSpec], data: TabularDataset, k: int, folds: int,
    fold_seed: int = 0,
) -> list[LabelerSpec]:
    if k < 1:
        raise TrainingError("k must be >= 1: the boundary needs at least one labeler")
    if k > len(specs):
        raise TrainingError(f"k={k} exceeds the {len(specs)} available specs")
    ranked = rank_specs_arrays(
        specs, encoded_matrix(data), data.require_labels(), data.schema.num_classes,
        folds, fold_seed)
    return [spec for spec, _ in ranked[:k]]
