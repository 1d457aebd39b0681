"""Shared fixtures and small builders used across the test modules."""

from __future__ import annotations

import numpy as np

from tabredact.dataset import TabularDataset
from tabredact.schema import FeatureKind, FeatureSchema, FeatureSpec


def numeric_schema(n_features: int = 2, lo: float = 0.0, hi: float = 1.0) -> FeatureSchema:
    feats = tuple(
        FeatureSpec(name=f"x{i}", kind=FeatureKind.NUMERIC, num_range=(lo, hi))
        for i in range(n_features)
    )
    return FeatureSchema(features=feats, label_column="y", label_values=("0", "1"))


def numeric_dataset(points, labels, lo: float = 0.0, hi: float = 1.0) -> TabularDataset:
    points = [tuple(float(v) for v in p) for p in points]
    schema = numeric_schema(len(points[0]), lo, hi)
    return TabularDataset(schema, tuple(points), np.asarray(labels, dtype=np.int64))


def adult_like_schema() -> FeatureSchema:
    """Small census-style schema with mixed feature kinds."""
    return FeatureSchema(
        features=(
            FeatureSpec("age", FeatureKind.DISCRETE, num_range=(17, 90)),
            FeatureSpec("hours", FeatureKind.NUMERIC, num_range=(0.0, 100.0)),
            FeatureSpec("marital", FeatureKind.CATEGORICAL, categories=("Wife", "Husband", "Single")),
            FeatureSpec("gender", FeatureKind.CATEGORICAL, categories=("Male", "Female")),
        ),
        label_column="income",
        label_values=("<=50K", ">50K"),
    )


def adult_like_dataset() -> TabularDataset:
    schema = adult_like_schema()
    rows = (
        (38, 40.0, "Single", "Male"),
        (52, 45.0, "Wife", "Female"),
        (43, 40.0, "Husband", "Male"),
        (29, 38.0, "Single", "Female"),
        (61, 20.0, "Husband", "Male"),
        (35, 50.0, "Wife", "Female"),
    )
    labels = np.array([0, 1, 1, 0, 0, 1])
    return TabularDataset(schema, rows, labels)


def two_blob_dataset(
    n_per_class: int = 50,
    separation: float = 4.0,
    n_features: int = 2,
    seed: int = 0,
    scale: float = 10.0,
) -> TabularDataset:
    """Two well-separated Gaussian blobs, numeric features only."""
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 1.0, size=(n_per_class, n_features))
    b = rng.normal(separation, 1.0, size=(n_per_class, n_features))
    pts = np.vstack([a, b]) + scale
    labels = np.array([0] * n_per_class + [1] * n_per_class)
    order = rng.permutation(len(pts))
    pts, labels = pts[order], labels[order]
    lo = float(pts.min()) - 1.0
    hi = float(pts.max()) + 1.0
    return numeric_dataset([tuple(p) for p in pts], labels, lo=lo, hi=hi)
