from .base import TrainedLabeler
from .io import labeler_from_dict, labeler_to_dict, load_labeler, save_labeler
from .specs import (
    LabelerFamily,
    LabelerSpec,
    default_attack_specs,
    default_victims,
    default_zoo,
)
from .training import (
    cross_val_accuracy,
    cross_val_accuracy_arrays,
    make_model,
    rank_specs_arrays,
    select_top_k,
    stratified_folds,
    train,
    train_arrays,
)

__all__ = [
    "TrainedLabeler",
    "LabelerFamily",
    "LabelerSpec",
    "default_zoo",
    "default_victims",
    "default_attack_specs",
    "train",
    "train_arrays",
    "cross_val_accuracy",
    "cross_val_accuracy_arrays",
    "rank_specs_arrays",
    "select_top_k",
    "stratified_folds",
    "make_model",
    "labeler_to_dict",
    "labeler_from_dict",
    "save_labeler",
    "load_labeler",
]
