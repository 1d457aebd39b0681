"""Synthetic mixed-type classification data for demos and benchmarks.

Each class is a mixture of overlapping Gaussian blobs in the numeric
features; categorical features are drawn from class-conditional
distributions so they carry signal and realistic co-occurrence structure.
"""

from __future__ import annotations

import numpy as np

from .dataset import TabularDataset
from .schema import FeatureKind, FeatureSchema, FeatureSpec

_VOCABS = (
    ("alpha", "beta", "gamma", "delta"),
    ("north", "south", "east"),
    ("low", "mid", "high"),
    ("red", "green", "blue", "grey"),
)


def make_mixture_dataset(
    n_rows: int,
    seed: int,
    n_numeric: int = 8,
    n_categorical: int = 2,
    class_sep: float = 2.2,
    components_per_class: int = 2,
    component_spread: float = 1.5,
    n_classes: int = 2,
    interleaved: bool = False,
) -> TabularDataset:
    """Overlapping per-class Gaussian mixtures with categorical side features.

    With ``interleaved`` the class shift alternates sign per component
    (XOR-like lobes), which no linear boundary can separate; otherwise every
    component of a class shifts the same way.
    """
    if n_categorical > len(_VOCABS):
        raise ValueError(f"at most {len(_VOCABS)} categorical features supported")
    rng = np.random.default_rng(seed)

    # component offsets are shared across classes so class overlap is set by
    # class_sep alone (class means differ by class_sep along the diagonal)
    shift = np.ones(n_numeric) / np.sqrt(n_numeric)
    offsets = rng.normal(0.0, component_spread, size=(components_per_class, n_numeric))
    centers = np.empty((n_classes, components_per_class, n_numeric))
    for c in range(n_classes):
        for k in range(components_per_class):
            if interleaved:
                sign = 1.0 if (c + k) % 2 == 0 else -1.0
                centers[c, k] = offsets[k] + sign * (class_sep / 2.0) * shift
            else:
                centers[c, k] = offsets[k] + c * class_sep * shift

    labels = rng.integers(0, n_classes, size=n_rows)
    comps = rng.integers(0, components_per_class, size=n_rows)
    numeric = centers[labels, comps] + rng.normal(0.0, 1.0, size=(n_rows, n_numeric))

    cat_columns = []
    for f in range(n_categorical):
        vocab = _VOCABS[f]
        v = len(vocab)
        # class-conditional preference: class c leans toward a different end
        table = np.empty((n_classes, v))
        for c in range(n_classes):
            weights = np.linspace(1.0, 3.0, v) if c % 2 else np.linspace(3.0, 1.0, v)
            table[c] = weights / weights.sum()
        draws = np.empty(n_rows, dtype=np.int64)
        for c in range(n_classes):
            mask = labels == c
            draws[mask] = rng.choice(v, size=int(mask.sum()), p=table[c])
        cat_columns.append([vocab[i] for i in draws])

    features = []
    for j in range(n_numeric):
        lo = float(numeric[:, j].min())
        hi = float(numeric[:, j].max())
        features.append(FeatureSpec(f"num{j}", FeatureKind.NUMERIC, num_range=(lo, hi)))
    for f in range(n_categorical):
        features.append(
            FeatureSpec(f"cat{f}", FeatureKind.CATEGORICAL, categories=_VOCABS[f][: len(_VOCABS[f])])
        )
    schema = FeatureSchema(
        features=tuple(features),
        label_column="label",
        label_values=tuple(f"c{c}" for c in range(n_classes)),
    )
    rows = []
    for i in range(n_rows):
        row = [float(v) for v in numeric[i]]
        row.extend(cat_columns[f][i] for f in range(n_categorical))
        rows.append(tuple(row))
    return TabularDataset(schema, tuple(rows), labels)
