"""Min-max scaling plus one-hot encoding into a shared real vector space.

All distances in the pipeline are computed in this space: scaled numeric
and discrete coordinates lie in [0, 1] for in-range inputs, and each
categorical feature contributes a one-hot block, so mixed feature types
stay commensurable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Row, TabularDataset
from .errors import DataError
from .schema import FeatureKind, FeatureSchema


@dataclass(frozen=True)
class EncodedVector:
    """A row mapped into the encoded space, with its index-to-feature map."""

    values: np.ndarray
    back_map: tuple[tuple[int, int | None], ...]  # per coordinate: (feature idx, category idx)

    @property
    def dim(self) -> int:
        return len(self.values)


def sq_distance(u: EncodedVector | np.ndarray, v: EncodedVector | np.ndarray) -> float:
    """Sum of squared coordinate differences."""
    a = u.values if isinstance(u, EncodedVector) else np.asarray(u, dtype=float)
    b = v.values if isinstance(v, EncodedVector) else np.asarray(v, dtype=float)
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(diff @ diff)


class Encoder:
    """Encodes schema-conformant rows to vectors and back.

    Scaling ranges come from the schema's per-feature num_range, i.e. from
    the dataset the schema was built on. A constant feature (min == max)
    encodes to 0.0.
    """

    def __init__(self, schema: FeatureSchema):
        self.schema = schema
        back_map: list[tuple[int, int | None]] = []
        starts: list[int] = []
        pos = 0
        for fi, spec in enumerate(schema.features):
            starts.append(pos)
            if spec.kind is FeatureKind.CATEGORICAL:
                assert spec.categories is not None
                for ci in range(len(spec.categories)):
                    back_map.append((fi, ci))
                pos += len(spec.categories)
            else:
                back_map.append((fi, None))
                pos += 1
        self.back_map = tuple(back_map)
        self._starts = starts
        self.dim = pos

    def encode_row(self, row: Row) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for fi, spec in enumerate(self.schema.features):
            value = row[fi]
            start = self._starts[fi]
            if spec.kind is FeatureKind.CATEGORICAL:
                assert spec.categories is not None
                try:
                    ci = spec.categories.index(value)
                except ValueError:
                    raise DataError(f"unknown category {value!r} for feature {spec.name!r}") from None
                vec[start + ci] = 1.0
            else:
                fval = float(value)
                if math.isnan(fval):
                    raise DataError(f"NaN value for feature {spec.name!r}")
                lo, hi = spec.num_range  # type: ignore[misc]
                vec[start] = 0.0 if hi == lo else (fval - lo) / (hi - lo)
        return vec

    def encode(self, row: Row) -> EncodedVector:
        return EncodedVector(self.encode_row(row), self.back_map)

    def transform(self, rows: Sequence[Row]) -> np.ndarray:
        """Encode many rows into an (n, D) matrix."""
        out = np.zeros((len(rows), self.dim), dtype=np.float64)
        for i, row in enumerate(rows):
            out[i] = self.encode_row(row)
        return out

    def decode(self, vec: EncodedVector | np.ndarray) -> Row:
        values = vec.values if isinstance(vec, EncodedVector) else np.asarray(vec, dtype=float)
        if len(values) != self.dim:
            raise DataError(f"dimension mismatch: {len(values)} vs {self.dim}")
        row: list = []
        for fi, spec in enumerate(self.schema.features):
            start = self._starts[fi]
            if spec.kind is FeatureKind.CATEGORICAL:
                assert spec.categories is not None
                block = values[start : start + len(spec.categories)]
                row.append(spec.categories[int(np.argmax(block))])
            else:
                lo, hi = spec.num_range  # type: ignore[misc]
                raw = lo if hi == lo else values[start] * (hi - lo) + lo
                if spec.kind is FeatureKind.DISCRETE:
                    row.append(int(math.floor(raw + 0.5)))
                else:
                    row.append(float(raw))
        return tuple(row)


def encode(dataset: TabularDataset, row: Row) -> EncodedVector:
    """Encode one row using the dataset's schema ranges."""
    return dataset_encoder(dataset).encode(row)


def dataset_encoder(dataset: TabularDataset) -> Encoder:
    """Per-dataset cached encoder (datasets are immutable)."""
    enc = dataset._cache.get("encoder")
    if enc is None:
        enc = Encoder(dataset.schema)
        dataset._cache["encoder"] = enc
    return enc


def encoded_matrix(dataset: TabularDataset) -> np.ndarray:
    """Cached (n, D) encoding of all rows."""
    mat = dataset._cache.get("encoded")
    if mat is None:
        mat = dataset_encoder(dataset).transform(dataset.rows)
        mat.flags.writeable = False
        dataset._cache["encoded"] = mat
    return mat
