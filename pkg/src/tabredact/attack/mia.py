"""Membership inference attacks and the defense evaluation harness.

The shadow-model attack trains replicas of the victim on disjoint splits,
labels their confidence vectors member/non-member, and fits one small
attack model per true class. Threshold attacks skip the models and score
membership by loss or confidence directly. Each harness runs the victim
with and without inserted disinformation; the attacker's models never see
the disinformation (they are trained on clean shadow splits).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..dataset import TabularDataset
from ..encoding import dataset_encoder, encoded_matrix
from ..errors import DataError, TrainingError
from ..labelers import LabelerSpec, train_arrays
from ..seeding import derive_seed
from .metrics import accuracy_pct, f1_binary, roc_auc
from .victims import disinfo_rows_and_labels


@dataclass
class AttackReport:
    """One attack's overall metric and target-level metric, before/after."""

    attack: str
    metric: str  # "f1" or "auc"
    overall_before: float
    target_before: float
    overall_after: float | None = None
    target_after: float | None = None

    @property
    def overall_change(self) -> float | None:
        if self.overall_after is None:
            return None
        return self.overall_after - self.overall_before

    @property
    def target_change(self) -> float | None:
        if self.target_after is None:
            return None
        return self.target_after - self.target_before

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "metric": self.metric,
            "overall_before": self.overall_before,
            "overall_after": self.overall_after,
            "target_before": self.target_before,
            "target_after": self.target_after,
            "overall_change": self.overall_change,
            "target_change": self.target_change,
        }


@dataclass
class MIAReport:
    reports: list[AttackReport]
    average: AttackReport
    protocol: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "attacks": [r.to_dict() for r in self.reports],
            "average": self.average.to_dict(),
            "protocol": self.protocol,
        }


def _average_reports(reports: list[AttackReport], name: str = "average") -> AttackReport:
    def mean(vals):
        vals = [v for v in vals if v is not None]
        return float(np.mean(vals)) if vals else None

    return AttackReport(
        attack=name,
        metric=reports[0].metric,
        overall_before=mean([r.overall_before for r in reports]),
        target_before=mean([r.target_before for r in reports]),
        overall_after=mean([r.overall_after for r in reports]),
        target_after=mean([r.target_after for r in reports]),
    )


def attack_features(model, X: np.ndarray, append_loss: bool = False,
                    y: np.ndarray | None = None) -> np.ndarray:
    """Sorted (descending) confidence vector, optionally with the loss appended."""
    probs = model.predict_proba_matrix(X)
    feats = np.sort(probs, axis=1)[:, ::-1]
    if append_loss:
        if y is None:
            raise DataError("loss features require labels")
        losses = -np.log(np.clip(probs[np.arange(len(y)), y], 1e-12, None))
        feats = np.hstack([feats, losses[:, None]])
    return feats


def membership_scores(model, X: np.ndarray, y: np.ndarray, mode: str) -> np.ndarray:
    """Per-example membership score: higher means more member-like."""
    probs = model.predict_proba_matrix(X)
    if mode == "loss":
        return -(-np.log(np.clip(probs[np.arange(len(y)), y], 1e-12, None)))
    if mode == "confidence":
        return probs.max(axis=1)
    raise DataError(f"unknown threshold mode {mode!r}")


def _split_population(n: int, member_indices: np.ndarray, n_shadows: int,
                      rng: np.random.Generator):
    """Victim holdout plus pairwise-disjoint shadow train/holdout splits."""
    m = len(member_indices)
    pool = np.setdiff1d(np.arange(n), member_indices)
    pool = pool[rng.permutation(len(pool))]
    need = m + 2 * m * n_shadows
    if len(pool) < need:
        raise DataError(
            f"insufficient population: need {need} non-member rows for the victim "
            f"holdout and {n_shadows} disjoint shadow splits, have {len(pool)}")
    victim_holdout = pool[:m]
    shadows = []
    offset = m
    for _ in range(n_shadows):
        shadows.append((pool[offset : offset + m], pool[offset + m : offset + 2 * m]))
        offset += 2 * m
    return victim_holdout, shadows


class _PerClassAttack:
    """One small membership classifier per true class."""

    def __init__(self, spec: LabelerSpec, num_classes: int):
        self.spec = spec
        self.num_classes = num_classes
        self.models: dict[int, object] = {}

    def fit(self, feats: np.ndarray, true_class: np.ndarray, member: np.ndarray,
            seed: int):
        for c in range(self.num_classes):
            mask = true_class == c
            if not mask.any():
                continue
            if len(np.unique(member[mask])) < 2:
                raise TrainingError(
                    f"attack training data for class {c} contains a single membership class")
            self.models[c] = train_arrays(
                self.spec.with_seed(derive_seed(seed, "attack", self.spec.name, c)),
                feats[mask], member[mask], 2)
        if not self.models:
            raise TrainingError("no attack models could be trained")
        return self

    def predict_member(self, feats: np.ndarray, true_class: np.ndarray) -> np.ndarray:
        out = np.zeros(len(feats), dtype=np.int64)
        for c, model in self.models.items():
            mask = true_class == c
            if mask.any():
                out[mask] = model.predict_matrix(feats[mask])
        return out


def _victim_training_sets(population, member_indices, disinfo):
    """Encoded train arrays for the clean and the defended victim."""
    encoder = dataset_encoder(population)
    X_all = encoded_matrix(population)
    y_all = population.require_labels()
    X_members = X_all[member_indices]
    y_members = y_all[member_indices]
    rows, labels = disinfo_rows_and_labels(disinfo)
    if rows:
        X_extra = encoder.transform(rows)
        X_def = np.vstack([X_members, X_extra])
        y_def = np.concatenate([y_members, np.asarray(labels, dtype=np.int64)])
    else:
        X_def, y_def = X_members, y_members
    return X_members, y_members, X_def, y_def


def shokri_mia(
    victim_spec: LabelerSpec,
    population: TabularDataset,
    member_indices: Sequence[int],
    target_indices: Sequence[int],
    n_shadows: int = 8,
    attack_specs: Sequence[LabelerSpec] | None = None,
    seed: int = 0,
    disinfo=None,
    shadow_spec: LabelerSpec | None = None,
    repeats: int = 1,
    append_loss: bool = False,
) -> MIAReport:
    """Shadow-model membership inference, evaluated with and without the
    disinformation inserted into the victim's training data.

    Overall F1 is measured on a balanced member/non-member pool; target
    inference accuracy is the fraction of protected targets (all members)
    the attack still recognizes as members.
    """
    from ..labelers import default_attack_specs

    member_indices = np.asarray(sorted(member_indices), dtype=np.int64)
    target_indices = np.asarray(sorted(target_indices), dtype=np.int64)
    if not np.isin(target_indices, member_indices).all():
        raise DataError("targets must be members of the victim's training set")
    attack_specs = list(attack_specs) if attack_specs is not None else default_attack_specs()
    shadow_spec = shadow_spec or victim_spec

    X_all = encoded_matrix(population)
    y_all = population.require_labels()
    num_classes = population.schema.num_classes
    X_members, y_members, X_def, y_def = _victim_training_sets(
        population, member_indices, disinfo)
    X_targets = X_all[target_indices]
    y_targets = y_all[target_indices]

    has_disinfo = len(X_def) > len(X_members)
    per_attack: dict[str, list[AttackReport]] = {s.name: [] for s in attack_specs}
    for rep in range(repeats):
        rng = np.random.default_rng(derive_seed(seed, "splits", rep))
        victim_holdout, shadow_splits = _split_population(
            len(population), member_indices, n_shadows, rng)

        victim_seed = derive_seed(seed, "victim", rep)
        clean = train_arrays(victim_spec.with_seed(victim_seed), X_members, y_members,
                             num_classes)
        defended = None
        if has_disinfo:
            defended = train_arrays(victim_spec.with_seed(victim_seed), X_def, y_def,
                                    num_classes)

        # attacker side: shadows and attack training data are disinfo-free
        feats_list, class_list, member_list = [], [], []
        for s, (train_idx, holdout_idx) in enumerate(shadow_splits):
            shadow = train_arrays(
                shadow_spec.with_seed(derive_seed(seed, "shadow", rep, s)),
                X_all[train_idx], y_all[train_idx], num_classes)
            for idx, is_member in ((train_idx, 1), (holdout_idx, 0)):
                feats_list.append(attack_features(shadow, X_all[idx], append_loss, y_all[idx]))
                class_list.append(y_all[idx])
                member_list.append(np.full(len(idx), is_member, dtype=np.int64))
        feats = np.vstack(feats_list)
        true_class = np.concatenate(class_list)
        member = np.concatenate(member_list)

        # balanced evaluation pool
        k = min(len(member_indices), len(victim_holdout))
        eval_members = member_indices[:k]
        eval_nonmembers = victim_holdout[:k]
        eval_idx = np.concatenate([eval_members, eval_nonmembers])
        eval_membership = np.concatenate([np.ones(k, dtype=int), np.zeros(k, dtype=int)])
        y_eval = y_all[eval_idx]

        for attack_spec in attack_specs:
            attack = _PerClassAttack(attack_spec, num_classes).fit(
                feats, true_class, member, derive_seed(seed, "fit", rep))
            row: dict[str, tuple[float, float] | None] = {"after": None}
            arms = [("before", clean)] + ([("after", defended)] if has_disinfo else [])
            for arm, victim in arms:
                eval_feats = attack_features(victim, X_all[eval_idx], append_loss, y_eval)
                preds = attack.predict_member(eval_feats, y_eval)
                overall = f1_binary(eval_membership, preds)
                target_feats = attack_features(victim, X_targets, append_loss, y_targets)
                target_preds = attack.predict_member(target_feats, y_targets)
                target_acc = accuracy_pct(np.ones(len(target_preds), dtype=int), target_preds)
                row[arm] = (overall, target_acc)
            after = row["after"]
            per_attack[attack_spec.name].append(
                AttackReport(
                    attack=attack_spec.name, metric="f1",
                    overall_before=row["before"][0], target_before=row["before"][1],
                    overall_after=None if after is None else after[0],
                    target_after=None if after is None else after[1],
                )
            )

    reports = [_average_reports(per_attack[s.name], s.name) for s in attack_specs]
    average = _average_reports(reports)
    protocol = {
        "eval_pool": "balanced member/non-member",
        "n_shadows": n_shadows,
        "repeats": repeats,
        "shadow_family": shadow_spec.name,
        "append_loss": append_loss,
    }
    return MIAReport(reports=reports, average=average, protocol=protocol)


def threshold_attack_metrics(
    victim, X_members, y_members, X_nonmembers, y_nonmembers, X_targets, y_targets,
    mode: str,
) -> tuple[float, float]:
    """(overall AUC, target AUC) for one trained victim."""
    if len(X_members) == 0 or len(X_nonmembers) == 0:
        raise DataError("empty member or non-member pool")
    member_scores = membership_scores(victim, X_members, y_members, mode)
    nonmember_scores = membership_scores(victim, X_nonmembers, y_nonmembers, mode)
    target_scores = membership_scores(victim, X_targets, y_targets, mode)
    overall = roc_auc(member_scores, nonmember_scores)
    target = roc_auc(target_scores, nonmember_scores)
    return overall, target


def threshold_mia(
    victim_spec: LabelerSpec,
    population: TabularDataset,
    member_indices: Sequence[int],
    target_indices: Sequence[int],
    mode: str = "loss",
    seed: int = 0,
    disinfo=None,
    repeats: int = 1,
) -> AttackReport:
    """Loss- or confidence-threshold attack, before/after disinformation."""
    member_indices = np.asarray(sorted(member_indices), dtype=np.int64)
    target_indices = np.asarray(sorted(target_indices), dtype=np.int64)
    if not np.isin(target_indices, member_indices).all():
        raise DataError("targets must be members of the victim's training set")
    if mode not in ("loss", "confidence"):
        raise DataError(f"unknown threshold mode {mode!r}")

    X_all = encoded_matrix(population)
    y_all = population.require_labels()
    num_classes = population.schema.num_classes
    X_members, y_members, X_def, y_def = _victim_training_sets(
        population, member_indices, disinfo)
    X_targets = X_all[target_indices]
    y_targets = y_all[target_indices]

    rows = []
    for rep in range(repeats):
        rng = np.random.default_rng(derive_seed(seed, "threshold_splits", rep))
        pool = np.setdiff1d(np.arange(len(population)), member_indices)
        pool = pool[rng.permutation(len(pool))]
        k = min(len(member_indices), len(pool))
        if k == 0:
            raise DataError("no non-member rows available")
        nonmembers = pool[:k]
        victim_seed = derive_seed(seed, "victim", rep)
        clean = train_arrays(victim_spec.with_seed(victim_seed), X_members, y_members,
                             num_classes)
        before = threshold_attack_metrics(
            clean, X_members, y_members, X_all[nonmembers], y_all[nonmembers],
            X_targets, y_targets, mode)
        after = (None, None)
        if len(X_def) > len(X_members):
            defended = train_arrays(victim_spec.with_seed(victim_seed), X_def, y_def,
                                    num_classes)
            after = threshold_attack_metrics(
                defended, X_members, y_members, X_all[nonmembers], y_all[nonmembers],
                X_targets, y_targets, mode)
        rows.append(AttackReport(
            attack=f"{mode}_threshold", metric="auc",
            overall_before=before[0], target_before=before[1],
            overall_after=after[0], target_after=after[1],
        ))
    return _average_reports(rows, name=f"{mode}_threshold")
