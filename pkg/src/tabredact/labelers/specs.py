"""Labeler specifications and the default model zoos.

A spec is a named (family, hyperparams, seed) triple. The default surrogate
zoo mixes small neural networks, trees, forests, boosting, linear models,
nearest neighbors, and naive Bayes so the combined boundary sees diverse
views of the data. Victim and attack zoos reuse the same families with
deliberately different hyperparameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping

from ..errors import ConfigError


class LabelerFamily(str, Enum):
    MLP = "mlp"
    DECISION_TREE = "decision_tree"
    RANDOM_FOREST = "random_forest"
    LOGISTIC_REGRESSION = "logistic_regression"
    LINEAR_SVM = "linear_svm"
    ADABOOST_STUMPS = "adaboost_stumps"
    GRADIENT_BOOST_STUMPS = "gradient_boost_stumps"
    KNN = "knn"
    NAIVE_BAYES = "naive_bayes"


_GRADIENT_FAMILIES = {
    LabelerFamily.MLP,
    LabelerFamily.LOGISTIC_REGRESSION,
    LabelerFamily.LINEAR_SVM,
}

_ACTIVATIONS = ("tanh", "relu", "logistic", "identity")

# Family hyperparameter defaults. Gradient-trained families default to the
# reference setting of lr 1e-4 over 1000 epochs (minibatch).
_DEFAULTS: dict[LabelerFamily, dict[str, Any]] = {
    LabelerFamily.MLP: {
        "hidden": (50, 25),
        "activation": "relu",
        "learning_rate": 1e-4,
        "epochs": 1000,
        "batch_size": 32,
    },
    LabelerFamily.DECISION_TREE: {
        "criterion": "gini",
        "max_depth": None,
        "min_samples_split": 2,
        "leaf_smoothing": 1,
    },
    LabelerFamily.RANDOM_FOREST: {
        "criterion": "gini",
        "n_trees": 25,
        "max_depth": None,
        "min_samples_split": 2,
        "leaf_smoothing": 1,
    },
    LabelerFamily.LOGISTIC_REGRESSION: {
        "learning_rate": 1e-4,
        "epochs": 1000,
        "batch_size": 32,
        "l2": 0.0,
    },
    LabelerFamily.LINEAR_SVM: {
        "learning_rate": 1e-4,
        "epochs": 1000,
        "batch_size": 32,
        "l2": 1e-4,
    },
    LabelerFamily.ADABOOST_STUMPS: {"n_rounds": 50},
    LabelerFamily.GRADIENT_BOOST_STUMPS: {"n_rounds": 50, "learning_rate": 0.1},
    LabelerFamily.KNN: {"k": 5},
    LabelerFamily.NAIVE_BAYES: {"var_smoothing": 1e-9},
}


@dataclass(frozen=True)
class LabelerSpec:
    """Identifier, family, family-specific hyperparameters, and RNG seed."""

    name: str
    family: LabelerFamily
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def resolved_params(self) -> dict[str, Any]:
        """Defaults overlaid with this spec's params (unknown keys rejected)."""
        defaults = dict(_DEFAULTS[self.family])
        for key, value in self.params.items():
            if key not in defaults:
                raise ConfigError(f"spec {self.name!r}: unknown param {key!r} for {self.family.value}")
            defaults[key] = value
        return defaults

    def validate(self) -> None:
        p = self.resolved_params()
        fam = self.family
        if fam is LabelerFamily.MLP:
            hidden = tuple(p["hidden"])
            if not hidden or any(int(w) < 1 for w in hidden):
                raise ConfigError(f"spec {self.name!r}: layer widths must be positive")
            if p["activation"] not in _ACTIVATIONS:
                raise ConfigError(f"spec {self.name!r}: unknown activation {p['activation']!r}")
        if fam in _GRADIENT_FAMILIES:
            if int(p["epochs"]) < 1:
                raise ConfigError(f"spec {self.name!r}: epochs must be >= 1")
            if float(p["learning_rate"]) <= 0:
                raise ConfigError(f"spec {self.name!r}: learning_rate must be > 0")
        if fam in (LabelerFamily.DECISION_TREE, LabelerFamily.RANDOM_FOREST):
            if p["criterion"] not in ("gini", "entropy"):
                raise ConfigError(f"spec {self.name!r}: criterion must be gini or entropy")
            if p["max_depth"] is not None and int(p["max_depth"]) < 1:
                raise ConfigError(f"spec {self.name!r}: max_depth must be >= 1")
        if fam is LabelerFamily.RANDOM_FOREST and int(p["n_trees"]) < 1:
            raise ConfigError(f"spec {self.name!r}: n_trees must be >= 1")
        if fam in (LabelerFamily.ADABOOST_STUMPS, LabelerFamily.GRADIENT_BOOST_STUMPS):
            if int(p["n_rounds"]) < 1:
                raise ConfigError(f"spec {self.name!r}: n_rounds must be >= 1")
        if fam is LabelerFamily.KNN and int(p["k"]) < 1:
            raise ConfigError(f"spec {self.name!r}: k must be >= 1")

    def with_seed(self, seed: int) -> "LabelerSpec":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "family": self.family.value,
            "params": _jsonable_params(self.params),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabelerSpec":
        try:
            family = LabelerFamily(data["family"])
        except (KeyError, ValueError):
            raise ConfigError(f"bad labeler family in spec: {data.get('family')!r}") from None
        params = dict(data.get("params", {}))
        if "hidden" in params:
            params["hidden"] = tuple(params["hidden"])
        spec = cls(name=data["name"], family=family, params=params, seed=int(data.get("seed", 0)))
        spec.validate()
        return spec


def _jsonable_params(params: Mapping[str, Any]) -> dict:
    out = {}
    for key, value in params.items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def _mlp(name: str, hidden, activation: str, lr: float, epochs: int) -> LabelerSpec:
    return LabelerSpec(
        name,
        LabelerFamily.MLP,
        {"hidden": hidden, "activation": activation, "learning_rate": lr, "epochs": epochs,
         "batch_size": 128},
    )


def default_zoo() -> list[LabelerSpec]:
    """The 18-member surrogate labeler zoo.

    Epochs and learning rates are tuned so the whole zoo cross-validates in
    seconds on CPU for datasets in the thousands of rows.
    """
    return [
        _mlp("s_nn_relu_5-2", (5, 2), "relu", 5e-3, 30),
        _mlp("s_nn_relu_50-25", (50, 25), "relu", 5e-3, 18),
        _mlp("s_nn_relu_200-100", (200, 100), "relu", 5e-3, 6),
        _mlp("s_nn_relu_25-10", (25, 10), "relu", 5e-3, 20),
        _mlp("s_nn_tanh_5-2", (5, 2), "tanh", 5e-3, 30),
        _mlp("s_nn_log_5-2", (5, 2), "logistic", 5e-3, 30),
        _mlp("s_nn_identity_5-2", (5, 2), "identity", 5e-3, 30),
        LabelerSpec("s_dt_gini", LabelerFamily.DECISION_TREE, {"criterion": "gini", "max_depth": 10}),
        LabelerSpec("s_dt_entropy", LabelerFamily.DECISION_TREE, {"criterion": "entropy", "max_depth": 10}),
        LabelerSpec("s_rf_gini", LabelerFamily.RANDOM_FOREST, {"criterion": "gini", "n_trees": 10, "max_depth": 8}),
        LabelerSpec("s_rf_entropy", LabelerFamily.RANDOM_FOREST, {"criterion": "entropy", "n_trees": 10, "max_depth": 8}),
        LabelerSpec("s_svm_linear", LabelerFamily.LINEAR_SVM,
                    {"learning_rate": 5e-3, "epochs": 60, "batch_size": 128}),
        LabelerSpec("s_logreg", LabelerFamily.LOGISTIC_REGRESSION,
                    {"learning_rate": 5e-3, "epochs": 60, "batch_size": 128}),
        LabelerSpec("s_ada", LabelerFamily.ADABOOST_STUMPS, {"n_rounds": 40}),
        LabelerSpec("s_gb", LabelerFamily.GRADIENT_BOOST_STUMPS, {"n_rounds": 40, "learning_rate": 0.2}),
        LabelerSpec("s_knn_5", LabelerFamily.KNN, {"k": 5}),
        LabelerSpec("s_knn_15", LabelerFamily.KNN, {"k": 15}),
        LabelerSpec("s_nb", LabelerFamily.NAIVE_BAYES),
    ]


def default_victims() -> list[LabelerSpec]:
    """13 victim models, hyperparameters distinct from the surrogate zoo.

    Trained to fit their data well (they simulate deployed models), with
    tree depths bounded so leaves pool tens of neighbors.
    """
    return [
        _mlp("v_nn_relu_64-32", (64, 32), "relu", 3e-3, 60),
        _mlp("v_nn_tanh_32-16", (32, 16), "tanh", 3e-3, 60),
        _mlp("v_nn_relu_100-50", (100, 50), "relu", 3e-3, 120),
        _mlp("v_nn_log_16-8", (16, 8), "logistic", 3e-3, 60),
        LabelerSpec("v_dt_gini", LabelerFamily.DECISION_TREE, {"criterion": "gini", "max_depth": 6}),
        LabelerSpec("v_dt_entropy", LabelerFamily.DECISION_TREE, {"criterion": "entropy", "max_depth": 7}),
        LabelerSpec("v_rf_gini", LabelerFamily.RANDOM_FOREST, {"criterion": "gini", "n_trees": 12, "max_depth": 8}),
        LabelerSpec("v_rf_entropy", LabelerFamily.RANDOM_FOREST, {"criterion": "entropy", "n_trees": 12, "max_depth": 9}),
        LabelerSpec("v_svm_linear", LabelerFamily.LINEAR_SVM,
                    {"learning_rate": 3e-3, "epochs": 90, "batch_size": 128}),
        LabelerSpec("v_knn_25", LabelerFamily.KNN, {"k": 25}),
        LabelerSpec("v_logreg", LabelerFamily.LOGISTIC_REGRESSION,
                    {"learning_rate": 3e-3, "epochs": 90, "batch_size": 128}),
        LabelerSpec("v_ada", LabelerFamily.ADABOOST_STUMPS, {"n_rounds": 60}),
        LabelerSpec("v_gb", LabelerFamily.GRADIENT_BOOST_STUMPS, {"n_rounds": 80, "learning_rate": 0.2}),
    ]


def default_attack_specs() -> list[LabelerSpec]:
    """9 small attack models (membership classifiers over confidence vectors)."""
    return [
        _mlp("a_tanh_5-2", (5, 2), "tanh", 5e-3, 80),
        _mlp("a_relu_5-2", (5, 2), "relu", 5e-3, 80),
        _mlp("a_identity_5-2", (5, 2), "identity", 5e-3, 80),
        LabelerSpec("a_dt_gini", LabelerFamily.DECISION_TREE, {"criterion": "gini", "max_depth": 4}),
        LabelerSpec("a_dt_entropy", LabelerFamily.DECISION_TREE, {"criterion": "entropy", "max_depth": 4}),
        LabelerSpec("a_rf_gini", LabelerFamily.RANDOM_FOREST, {"criterion": "gini", "n_trees": 10, "max_depth": 4}),
        LabelerSpec("a_rf_entropy", LabelerFamily.RANDOM_FOREST, {"criterion": "entropy", "n_trees": 10, "max_depth": 4}),
        LabelerSpec("a_ada", LabelerFamily.ADABOOST_STUMPS, {"n_rounds": 25}),
        LabelerSpec("a_logreg", LabelerFamily.LOGISTIC_REGRESSION,
                    {"learning_rate": 5e-3, "epochs": 80, "batch_size": 128}),
    ]
