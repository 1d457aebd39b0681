"""Victim retraining harness: how inserted disinformation shifts a model's
behavior on protected targets versus the overall test set."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dataset import TabularDataset
from ..encoding import dataset_encoder, encoded_matrix
from ..errors import DataError
from ..labelers import LabelerSpec, train_arrays
from ..pipeline import DisinfoConfig, DisinfoResult, redact
from ..seeding import derive_seed


@dataclass
class VictimOutcome:
    victim: str
    repeat: int
    test_acc_before: float
    test_acc_after: float
    target_acc_before: float
    target_acc_after: float
    target_conf_before: float
    target_conf_after: float

    @property
    def test_acc_change(self) -> float:
        return self.test_acc_after - self.test_acc_before

    @property
    def target_acc_change(self) -> float:
        return self.target_acc_after - self.target_acc_before

    @property
    def target_conf_change(self) -> float:
        return self.target_conf_after - self.target_conf_before

    def to_dict(self) -> dict:
        d = dict(vars(self))
        d["test_acc_change"] = self.test_acc_change
        d["target_acc_change"] = self.target_acc_change
        d["target_conf_change"] = self.target_conf_change
        return d


@dataclass
class TargetReport:
    """Signed percentage changes, averaged over victim specs x repeats."""

    outcomes: list[VictimOutcome]

    def _agg(self, attr: str) -> tuple[float, float]:
        values = np.asarray([getattr(o, attr) for o in self.outcomes])
        return float(values.mean()), float(values.std())

    @property
    def test_acc_change(self) -> tuple[float, float]:
        return self._agg("test_acc_change")

    @property
    def target_acc_change(self) -> tuple[float, float]:
        return self._agg("target_acc_change")

    @property
    def target_conf_change(self) -> tuple[float, float]:
        return self._agg("target_conf_change")

    def to_dict(self) -> dict:
        mean_t, std_t = self.test_acc_change
        mean_a, std_a = self.target_acc_change
        mean_c, std_c = self.target_conf_change
        return {
            "overall_test_acc_change": {"mean": mean_t, "std": std_t},
            "target_acc_change": {"mean": mean_a, "std": std_a},
            "target_conf_change": {"mean": mean_c, "std": std_c},
            "per_victim": [o.to_dict() for o in self.outcomes],
        }


def _metrics(model, X_test, y_test, X_targets, y_targets):
    test_acc = 100.0 * model.accuracy(X_test, y_test)
    target_probs = model.predict_proba_matrix(X_targets)
    target_preds = np.argmax(target_probs, axis=1)
    target_acc = 100.0 * float(np.mean(target_preds == y_targets))
    target_conf = 100.0 * float(np.mean(target_probs[np.arange(len(y_targets)), y_targets]))
    return test_acc, target_acc, target_conf


def _victim_cell(args):
    (spec, seed, X_before, y_before, X_after, y_after, num_classes,
     X_test, y_test, X_targets, y_targets, name, repeat) = args
    seeded = spec.with_seed(seed)
    before = train_arrays(seeded, X_before, y_before, num_classes)
    b = _metrics(before, X_test, y_test, X_targets, y_targets)
    after = train_arrays(seeded, X_after, y_after, num_classes)
    a = _metrics(after, X_test, y_test, X_targets, y_targets)
    return VictimOutcome(name, repeat, b[0], a[0], b[1], a[1], b[2], a[2])


def _as_disinfo_list(disinfo) -> list[DisinfoResult]:
    if disinfo is None:
        return []
    if isinstance(disinfo, DisinfoResult):
        return [disinfo]
    return list(disinfo)


def disinfo_rows_and_labels(disinfo) -> tuple[list, list[int]]:
    rows: list = []
    labels: list[int] = []
    for result in _as_disinfo_list(disinfo):
        rows.extend(result.rows)
        labels.extend(result.assigned_labels)
    return rows, labels


def eval_disinfo(
    victim_specs: Sequence[LabelerSpec],
    data: TabularDataset,
    disinfo,
    targets: TabularDataset,
    test_set: TabularDataset,
    repeats: int = 3,
    seed: int = 0,
    jobs: int = 1,
) -> TargetReport:
    """Train each victim on the data with and without the disinformation
    (same seeds both arms) and report the signed metric changes.

    Inserted rows carry their boundary-assigned labels. Targets may not
    appear in the test set; that would conflate target and overall effects.
    """
    if len(test_set) == 0:
        raise DataError("empty test set")
    if targets.schema != data.schema or test_set.schema != data.schema:
        raise DataError("targets and test set must share the training schema")
    test_rows = set(test_set.rows)
    for row in targets.rows:
        if row in test_rows:
            raise DataError("a target row appears in the test set")

    rows, labels = disinfo_rows_and_labels(disinfo)
    augmented = data.with_rows(rows, labels) if rows else data

    encoder = dataset_encoder(data)
    X_before = encoded_matrix(data)
    y_before = data.require_labels()
    X_after = encoder.transform(augmented.rows)
    y_after = augmented.require_labels()
    X_test = encoder.transform(test_set.rows)
    y_test = test_set.require_labels()
    X_targets = encoder.transform(targets.rows)
    y_targets = targets.require_labels()
    num_classes = data.schema.num_classes

    tasks = []
    for spec in victim_specs:
        for rep in range(repeats):
            tasks.append((
                spec, derive_seed(seed, "victim", spec.name, rep),
                X_before, y_before, X_after, y_after, num_classes,
                X_test, y_test, X_targets, y_targets, spec.name, rep,
            ))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_victim_cell, tasks))
    else:
        outcomes = [_victim_cell(t) for t in tasks]
    return TargetReport(outcomes=outcomes)


def budget_curve(
    victim_specs: Sequence[LabelerSpec],
    data: TabularDataset,
    targets: TabularDataset,
    budgets: Sequence[int],
    config: DisinfoConfig,
    test_set: TabularDataset,
    repeats: int = 1,
    seed: int = 0,
    pdb=None,
    jobs: int = 1,
) -> list[tuple[int, TargetReport]]:
    """One evaluation per budget, slicing prefixes of a single large
    redaction per target (nested budgets)."""
    budgets = list(budgets)
    if budgets != sorted(budgets):
        raise DataError("budgets must be ascending")
    if not budgets:
        raise DataError("no budgets given")
    max_budget = budgets[-1]
    if max_budget < 1:
        raise DataError("largest budget must be >= 1")

    full_runs: list[DisinfoResult] = []
    labels = targets.require_labels()
    run_config = config if config.n_disinfo == max_budget else config.with_n(max_budget)
    for i, row in enumerate(targets.rows):
        full_runs.append(redact(data, row, int(labels[i]), run_config, pdb=pdb))

    out = []
    for budget in budgets:
        sliced = [
            DisinfoResult(run.selected[:budget], run.target, run.target_class, run.stats)
            for run in full_runs
        ]
        report = eval_disinfo(victim_specs, data, sliced, targets, test_set,
                              repeats=repeats, seed=seed, jobs=jobs)
        out.append((budget, report))
    return out
