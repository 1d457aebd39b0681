"""Realism constraints for generated rows.

Categorical plausibility uses co-occurrence: any pair of categorical values
never seen together in the source data marks a row as unrealistic (for
example a dataset may contain no row with Marital=Wife and Gender=Male).
Numeric plausibility is enforced by clipping to observed ranges and
rounding discrete features to integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import Row, TabularDataset
from .schema import FeatureKind, FeatureSchema


@dataclass(frozen=True)
class PairIndex:
    """Observed value pairs for every unordered pair of categorical features."""

    feature_pairs: tuple[tuple[int, int], ...]
    observed: dict[tuple[int, int], frozenset[tuple[str, str]]]

    @property
    def is_empty(self) -> bool:
        return not self.feature_pairs


def build_pair_index(dataset: TabularDataset) -> PairIndex:
    cat_idx = [
        i for i, spec in enumerate(dataset.schema.features) if spec.kind is FeatureKind.CATEGORICAL
    ]
    pairs = [(a, b) for pos, a in enumerate(cat_idx) for b in cat_idx[pos + 1 :]]
    observed: dict[tuple[int, int], frozenset[tuple[str, str]]] = {}
    for a, b in pairs:
        seen = {(row[a], row[b]) for row in dataset.rows}
        observed[(a, b)] = frozenset(seen)
    return PairIndex(feature_pairs=tuple(pairs), observed=observed)


def is_realistic(row: Row, index: PairIndex, schema: FeatureSchema) -> bool:
    """False iff some categorical value pair in the row is absent from the index.

    Vacuously true when the data has fewer than two categorical features.
    """
    for a, b in index.feature_pairs:
        if (row[a], row[b]) not in index.observed[(a, b)]:
            return False
    return True


def clip_quantize(row: Row, schema: FeatureSchema) -> Row:
    """Clamp numeric/discrete values to their ranges; round discretes to int."""
    out = []
    for spec, value in zip(schema.features, row):
        if spec.kind is FeatureKind.CATEGORICAL:
            out.append(value)
            continue
        lo, hi = spec.num_range  # type: ignore[misc]
        if spec.kind is FeatureKind.DISCRETE:
            v = math.floor(float(value) + 0.5)
            out.append(int(min(max(v, lo), hi)))
        else:
            out.append(float(min(max(float(value), lo), hi)))
    return tuple(out)
