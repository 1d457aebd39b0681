"""Versioned persistence of trained labelers (JSON artifacts)."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import DataError
from .base import TrainedLabeler
from .specs import LabelerSpec
from .training import make_model

LABELER_ARTIFACT_VERSION = 1


def labeler_to_dict(labeler: TrainedLabeler) -> dict:
    return {
        "artifact_version": LABELER_ARTIFACT_VERSION,
        "spec": labeler.spec.to_dict(),
        "input_dim": labeler.input_dim,
        "num_classes": labeler.num_classes,
        "params": labeler.params_to_dict(),
    }


def labeler_from_dict(data: dict) -> TrainedLabeler:
    version = data.get("artifact_version")
    if version != LABELER_ARTIFACT_VERSION:
        raise DataError(f"unsupported labeler artifact_version: {version!r}")
    spec = LabelerSpec.from_dict(data["spec"])
    model = make_model(spec, int(data["input_dim"]), int(data["num_classes"]))
    model.params_from_dict(data["params"])
    return model


def save_labeler(labeler: TrainedLabeler, path: str | Path) -> None:
    Path(path).write_text(json.dumps(labeler_to_dict(labeler)) + "\n", encoding="utf-8")


def load_labeler(path: str | Path) -> TrainedLabeler:
    return labeler_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
