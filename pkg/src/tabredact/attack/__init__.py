from .metrics import accuracy_pct, f1_binary, mean_confidence_pct, roc_auc
from .mia import (
    AttackReport,
    MIAReport,
    attack_features,
    membership_scores,
    shokri_mia,
    threshold_attack_metrics,
    threshold_mia,
)
from .victims import TargetReport, VictimOutcome, budget_curve, eval_disinfo

__all__ = [
    "roc_auc",
    "f1_binary",
    "accuracy_pct",
    "mean_confidence_pct",
    "AttackReport",
    "MIAReport",
    "attack_features",
    "membership_scores",
    "shokri_mia",
    "threshold_attack_metrics",
    "threshold_mia",
    "TargetReport",
    "VictimOutcome",
    "eval_disinfo",
    "budget_curve",
]
