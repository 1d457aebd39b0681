"""Conservative probabilistic decision boundary over abstaining labelers.

Each trained labeler becomes a labeling function that may abstain when not
confident. Votes over the training rows form a label matrix; a generative
model with latent true labels (independent labeling functions, per-LF
accuracy and abstention propensity, symmetric error across wrong classes)
is fitted by EM. The resulting posterior plus a tolerance threshold alpha
defines the boundary: a point "crosses" only when the model confidently
assigns it a class other than the protected target's.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import DataError
from .labelers.base import TrainedLabeler
from .labelers.io import labeler_from_dict, labeler_to_dict

ABSTAIN = -1

PDB_ARTIFACT_VERSION = 1

# accuracy bounds keep posterior factors finite without visibly moving the
# likelihood away from its unconstrained optimum
_ACC_FLOOR = 1e-6
_INIT_CLAMP = (0.05, 0.95)


class AbstainMode(str, Enum):
    """How the abstain threshold beta maps to a confidence cutoff.

    LITERAL abstains when max class probability <= beta / C, exactly as the
    rule is written; for small beta this never fires (max prob >= 1/C).
    MARGIN abstains when max class probability <= 1/C + beta, which actually
    filters low-margin votes, and is the default.
    """

    LITERAL = "literal"
    MARGIN = "margin"


def _cutoff(beta: float, num_classes: int, mode: AbstainMode) -> float:
    if mode is AbstainMode.LITERAL:
        return beta / num_classes
    return 1.0 / num_classes + beta


def lf_vote(
    labeler: TrainedLabeler,
    x,
    beta: float,
    mode: AbstainMode | str = AbstainMode.MARGIN,
) -> int:
    """Labeling-function output for one input: a class index or ABSTAIN."""
    mode = AbstainMode(mode)
    if beta < 0:
        raise DataError("beta must be >= 0")
    probs = np.asarray(labeler.predict_proba(x), dtype=float)
    if probs.ndim != 1 or not np.isclose(probs.sum(), 1.0, atol=1e-6) or probs.min() < -1e-12:
        raise DataError("labeler returned an invalid probability vector")
    if float(probs.max()) <= _cutoff(beta, len(probs), mode):
        return ABSTAIN
    return int(np.argmax(probs))


@dataclass(frozen=True)
class LabelMatrix:
    """Votes of m labeling functions over n rows (entries: class or ABSTAIN)."""

    votes: np.ndarray

    def __post_init__(self) -> None:
        votes = np.asarray(self.votes, dtype=np.int64)
        if votes.ndim != 2:
            raise DataError("label matrix must be 2-dimensional")
        if votes.size and votes.min() < ABSTAIN:
            raise DataError("label matrix entries must be class indices or ABSTAIN")
        object.__setattr__(self, "votes", votes)

    @property
    def num_lfs(self) -> int:
        return self.votes.shape[0]

    @property
    def num_rows(self) -> int:
        return self.votes.shape[1]


def build_label_matrix(
    labelers: list[TrainedLabeler],
    X: np.ndarray,
    beta: float,
    mode: AbstainMode | str = AbstainMode.MARGIN,
) -> LabelMatrix:
    """Vote matrix: entry (i, j) is labeler i's vote on row j."""
    mode = AbstainMode(mode)
    if beta < 0:
        raise DataError("beta must be >= 0")
    X = np.asarray(X, dtype=np.float64)
    if len(labelers) == 0:
        raise DataError("need at least one labeler")
    if X.ndim != 2 or len(X) == 0:
        raise DataError("need at least one row")
    votes = np.empty((len(labelers), len(X)), dtype=np.int64)
    for i, labeler in enumerate(labelers):
        probs = labeler.predict_proba_matrix(X)
        cutoff = _cutoff(beta, probs.shape[1], mode)
        votes[i] = np.argmax(probs, axis=1)
        votes[i, probs.max(axis=1) <= cutoff] = ABSTAIN
    return LabelMatrix(votes)


@dataclass(frozen=True)
class LabelModelParams:
    """Fitted generative parameters.

    class_priors: P(Y = c). accuracies[i]: P(vote = Y | LF i did not abstain).
    propensities[i]: P(LF i does not abstain).
    """

    class_priors: np.ndarray
    accuracies: np.ndarray
    propensities: np.ndarray

    def __post_init__(self) -> None:
        priors = np.asarray(self.class_priors, dtype=np.float64)
        acc = np.asarray(self.accuracies, dtype=np.float64)
        prop = np.asarray(self.propensities, dtype=np.float64)
        if not np.isclose(priors.sum(), 1.0, atol=1e-9):
            raise DataError("class priors must sum to 1")
        if np.any(acc <= 0.0) or np.any(acc >= 1.0):
            raise DataError("accuracies must lie in (0, 1)")
        if np.any(prop <= 0.0) or np.any(prop > 1.0):
            raise DataError("propensities must lie in (0, 1]")
        object.__setattr__(self, "class_priors", priors)
        object.__setattr__(self, "accuracies", acc)
        object.__setattr__(self, "propensities", prop)

    @property
    def num_classes(self) -> int:
        return len(self.class_priors)


def _vote_factors(votes: np.ndarray, accuracies: np.ndarray, num_classes: int) -> np.ndarray:
    """Per-row per-class products of the non-abstain vote factors.

    votes: (m, n). Returns (n, C) with entry [j, c] = prod over non-abstaining
    LFs i of (a_i if vote = c else (1 - a_i) / (C - 1)).
    """
    m, n = votes.shape
    factors = np.ones((n, num_classes))
    for i in range(m):
        active = votes[i] != ABSTAIN
        if not active.any():
            continue
        wrong = (1.0 - accuracies[i]) / (num_classes - 1)
        fi = np.full((int(active.sum()), num_classes), wrong)
        fi[np.arange(len(fi)), votes[i, active]] = accuracies[i]
        factors[active] *= fi
    return factors


def _log_likelihood(votes: np.ndarray, params: LabelModelParams) -> float:
    """Full marginal log-likelihood, abstention factors included."""
    factors = _vote_factors(votes, params.accuracies, params.num_classes)
    per_row = factors @ params.class_priors
    ll = float(np.sum(np.log(np.clip(per_row, 1e-300, None))))
    active_counts = (votes != ABSTAIN).sum(axis=1)
    inactive_counts = votes.shape[1] - active_counts
    p = params.propensities
    log_p = np.log(p)
    log_q = np.log(np.clip(1.0 - p, 1e-300, None))  # zero-count terms stay zero
    ll += float(np.sum(active_counts * log_p) + np.sum(inactive_counts * log_q))
    return ll


def majority_vote_labels(matrix: LabelMatrix, num_classes: int) -> np.ndarray:
    """Per-row majority vote over non-abstains; all-abstain rows get class 0.

    Ties break toward the lowest class index.
    """
    counts = np.zeros((matrix.num_rows, num_classes))
    for c in range(num_classes):
        counts[:, c] = (matrix.votes == c).sum(axis=0)
    return np.argmax(counts, axis=1)


@dataclass
class EMConfig:
    max_iters: int = 200
    tol: float = 1e-7


def fit_label_model(
    matrix: LabelMatrix,
    num_classes: int,
    em_config: EMConfig | None = None,
    track_likelihood: bool = False,
):
    """Fit priors, accuracies, and propensities by EM.

    Initialization comes from majority vote (accuracies clamped to
    [0.05, 0.95]); iteration stops when the log-likelihood improves by less
    than tol or after max_iters. Columns where every LF abstained carry no
    vote information and are dropped with a warning.

    With track_likelihood, returns (params, history) where history is the
    per-iteration log-likelihood (nondecreasing).
    """
    cfg = em_config or EMConfig()
    if num_classes < 2:
        raise DataError("need at least 2 classes")
    votes = matrix.votes
    if votes.size == 0:
        raise DataError("empty label matrix")
    active_cols = (votes != ABSTAIN).any(axis=0)
    if not active_cols.any():
        raise DataError("every labeling function abstained on every row")
    if not active_cols.all():
        import warnings

        warnings.warn(
            f"dropping {int((~active_cols).sum())} all-abstain columns from label model fit",
            stacklevel=2,
        )
        votes = votes[:, active_cols]
    m, n = votes.shape

    # propensity MLE is closed-form and does not depend on the latent labels
    active = votes != ABSTAIN
    propensities = np.clip(active.mean(axis=1), 1.0 / (2 * n), 1.0)

    # majority-vote initialization
    mv = majority_vote_labels(LabelMatrix(votes), num_classes)
    priors = np.bincount(mv, minlength=num_classes).astype(np.float64)
    priors = np.clip(priors, 0.5, None)
    priors /= priors.sum()
    accuracies = np.empty(m)
    for i in range(m):
        if active[i].any():
            accuracies[i] = float(np.mean(votes[i, active[i]] == mv[active[i]]))
        else:
            accuracies[i] = 0.5
    accuracies = np.clip(accuracies, *_INIT_CLAMP)

    history: list[float] = []
    prev_ll = -np.inf
    for _ in range(cfg.max_iters):
        # E-step
        factors = _vote_factors(votes, accuracies, num_classes)
        joint = factors * priors[None, :]
        totals = joint.sum(axis=1, keepdims=True)
        resp = joint / np.clip(totals, 1e-300, None)

        if track_likelihood:
            history.append(
                _log_likelihood(
                    votes,
                    LabelModelParams(priors, np.clip(accuracies, _ACC_FLOOR, 1 - _ACC_FLOOR),
                                     propensities),
                )
            )

        # M-step
        priors = resp.mean(axis=0)
        priors = priors / priors.sum()
        for i in range(m):
            idx = np.flatnonzero(active[i])
            if len(idx) == 0:
                continue
            correct = resp[idx, votes[i, idx]].sum()
            accuracies[i] = correct / len(idx)
        accuracies = np.clip(accuracies, _ACC_FLOOR, 1.0 - _ACC_FLOOR)

        ll = _log_likelihood(votes, LabelModelParams(priors, accuracies, propensities))
        if ll - prev_ll < cfg.tol and np.isfinite(prev_ll):
            prev_ll = ll
            break
        prev_ll = ll

    params = LabelModelParams(priors, accuracies, propensities)
    if track_likelihood:
        history.append(prev_ll)
        return params, history
    return params


@dataclass(frozen=True)
class PDB:
    """The conservative boundary: label model + labelers + (alpha, beta)."""

    params: LabelModelParams
    labelers: tuple[TrainedLabeler, ...]
    alpha: float
    beta: float
    mode: AbstainMode = AbstainMode.MARGIN

    def __post_init__(self) -> None:
        if not self.labelers:
            raise DataError("a boundary needs at least one labeler")
        if len(self.labelers) != len(self.params.accuracies):
            raise DataError("labeler count does not match fitted parameters")
        if self.beta < 0:
            raise DataError("beta must be >= 0")
        if not (0.0 < self.alpha < 1.0):
            raise DataError("alpha must lie in (0, 1)")
        object.__setattr__(self, "mode", AbstainMode(self.mode))

    @property
    def num_classes(self) -> int:
        return self.params.num_classes

    def votes_matrix(self, X: np.ndarray) -> LabelMatrix:
        return build_label_matrix(list(self.labelers), X, self.beta, self.mode)

    def posterior_matrix(self, X: np.ndarray) -> np.ndarray:
        """P(Y | votes) for each row; all-abstain rows fall back to the priors."""
        X = np.asarray(X, dtype=np.float64)
        matrix = self.votes_matrix(X)
        return posterior_from_votes(matrix, self.params)

    def posterior(self, x) -> np.ndarray:
        arr = x.values if hasattr(x, "values") else np.asarray(x, dtype=np.float64)
        return self.posterior_matrix(arr[None, :])[0]

    def across_boundary_matrix(self, X: np.ndarray, target_class: int) -> np.ndarray:
        post = self.posterior_matrix(X)
        return crossing_mask(post, target_class, self.alpha)

    def across_boundary(self, x, target_class: int) -> bool:
        arr = x.values if hasattr(x, "values") else np.asarray(x, dtype=np.float64)
        return bool(self.across_boundary_matrix(arr[None, :], target_class)[0])


def posterior_from_votes(matrix: LabelMatrix, params: LabelModelParams) -> np.ndarray:
    factors = _vote_factors(matrix.votes, params.accuracies, params.num_classes)
    joint = factors * params.class_priors[None, :]
    return joint / joint.sum(axis=1, keepdims=True)


def crossing_mask(posteriors: np.ndarray, target_class: int, alpha: float) -> np.ndarray:
    """True where argmax != target class and the best other class has mass >= alpha."""
    top = np.argmax(posteriors, axis=1)
    others = posteriors.copy()
    others[:, target_class] = -np.inf
    best_other = others.max(axis=1)
    return (top != target_class) & (best_other >= alpha)


def across_boundary(pdb: PDB, x, target_class: int) -> bool:
    return pdb.across_boundary(x, target_class)


def pdb_precision(
    pdb: PDB, X: np.ndarray, true_labels: np.ndarray, target_class: int
) -> float | None:
    """Among rows that cross the boundary, the fraction truly not of the
    target's class. None when nothing crosses."""
    crossing = pdb.across_boundary_matrix(np.asarray(X, dtype=np.float64), target_class)
    if not crossing.any():
        return None
    labels = np.asarray(true_labels)
    return float(np.mean(labels[crossing] != target_class))


def majority_vote_precision(
    labelers: list[TrainedLabeler],
    X: np.ndarray,
    true_labels: np.ndarray,
    target_class: int,
    beta: float,
    mode: AbstainMode | str = AbstainMode.MARGIN,
) -> float | None:
    """Baseline: precision of plain majority vote's "different class" calls."""
    matrix = build_label_matrix(labelers, np.asarray(X, dtype=np.float64), beta, mode)
    num_classes = labelers[0].num_classes
    mv = majority_vote_labels(matrix, num_classes)
    voted = (matrix.votes != ABSTAIN).any(axis=0)
    crossing = (mv != target_class) & voted
    if not crossing.any():
        return None
    labels = np.asarray(true_labels)
    return float(np.mean(labels[crossing] != target_class))


# -- persistence -----------------------------------------------------------


def pdb_to_dict(pdb: PDB, include_labelers: bool = True) -> dict:
    data = {
        "artifact_version": PDB_ARTIFACT_VERSION,
        "alpha": pdb.alpha,
        "beta": pdb.beta,
        "mode": pdb.mode.value,
        "class_priors": pdb.params.class_priors.tolist(),
        "labeling_functions": [
            {
                "name": labeler.spec.name,
                "accuracy": float(pdb.params.accuracies[i]),
                "propensity": float(pdb.params.propensities[i]),
            }
            for i, labeler in enumerate(pdb.labelers)
        ],
    }
    if include_labelers:
        data["labelers"] = [labeler_to_dict(labeler) for labeler in pdb.labelers]
    return data


def pdb_from_dict(data: dict) -> PDB:
    version = data.get("artifact_version")
    if version != PDB_ARTIFACT_VERSION:
        raise DataError(f"unsupported boundary artifact_version: {version!r}")
    if "labelers" not in data:
        raise DataError("boundary artifact does not embed its labelers")
    labelers = tuple(labeler_from_dict(entry) for entry in data["labelers"])
    params = LabelModelParams(
        np.asarray(data["class_priors"], dtype=np.float64),
        np.asarray([lf["accuracy"] for lf in data["labeling_functions"]], dtype=np.float64),
        np.asarray([lf["propensity"] for lf in data["labeling_functions"]], dtype=np.float64),
    )
    return PDB(params=params, labelers=labelers, alpha=float(data["alpha"]),
               beta=float(data["beta"]), mode=AbstainMode(data["mode"]))


def save_pdb(pdb: PDB, path: str | Path) -> None:
    Path(path).write_text(json.dumps(pdb_to_dict(pdb)) + "\n", encoding="utf-8")


def load_pdb(path: str | Path) -> PDB:
    return pdb_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
