"""Typed feature schemas for tabular data and CSV schema inference."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import DataError

SCHEMA_FORMAT_VERSION = 1


class FeatureKind(str, Enum):
    NUMERIC = "numeric"
    DISCRETE = "discrete"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureSpec:
    """One column: its kind plus the kind-specific metadata.

    Numeric and discrete features carry the observed (min, max) range used
    for scaling and clipping; categorical features carry the ordered list
    of admissible category strings.
    """

    name: str
    kind: FeatureKind
    num_range: tuple[float, float] | None = None
    categories: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise DataError("feature name must be non-empty")
        if self.kind is FeatureKind.CATEGORICAL:
            if self.num_range is not None:
                raise DataError(f"feature {self.name!r}: categorical cannot have num_range")
            if not self.categories:
                raise DataError(f"feature {self.name!r}: categories must be non-empty")
            if len(set(self.categories)) != len(self.categories):
                raise DataError(f"feature {self.name!r}: duplicate categories")
        else:
            if self.categories is not None:
                raise DataError(f"feature {self.name!r}: {self.kind.value} cannot have categories")
            if self.num_range is None:
                raise DataError(f"feature {self.name!r}: {self.kind.value} requires num_range")
            lo, hi = self.num_range
            if not (lo <= hi):
                raise DataError(f"feature {self.name!r}: num_range min {lo} > max {hi}")

    @property
    def is_numeric_like(self) -> bool:
        return self.kind is not FeatureKind.CATEGORICAL


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature specs plus the label column contract.

    ``label_values`` fixes the class-index mapping (index c <-> label_values[c]),
    so CSV round trips and report files stay stable across runs.
    """

    features: tuple[FeatureSpec, ...]
    label_column: str
    label_values: tuple[str, ...]

    def __post_init__(self) -> None:
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise DataError("duplicate feature names in schema")
        if self.label_column in names:
            raise DataError(f"label column {self.label_column!r} is also a feature")
        if len(self.label_values) < 2:
            raise DataError("schema needs at least 2 classes")
        if len(set(self.label_values)) != len(self.label_values):
            raise DataError("duplicate label values")

    @property
    def num_classes(self) -> int:
        return len(self.label_values)

    def feature(self, name: str) -> FeatureSpec:
        for spec in self.features:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def feature_index(self, name: str) -> int:
        for i, spec in enumerate(self.features):
            if spec.name == name:
                return i
        raise KeyError(name)

    def label_index(self, value: str) -> int:
        try:
            return self.label_values.index(value)
        except ValueError:
            raise DataError(f"unknown label value {value!r}") from None

    # -- persistence ------------------------------------------------------

    def to_dict(self) -> dict:
        feats = []
        for spec in self.features:
            entry: dict = {"name": spec.name, "kind": spec.kind.value}
            if spec.num_range is not None:
                entry["num_range"] = list(spec.num_range)
            if spec.categories is not None:
                entry["categories"] = list(spec.categories)
            feats.append(entry)
        return {
            "schema_version": SCHEMA_FORMAT_VERSION,
            "features": feats,
            "label_column": self.label_column,
            "label_values": list(self.label_values),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSchema":
        version = data.get("schema_version")
        if version != SCHEMA_FORMAT_VERSION:
            raise DataError(f"unsupported schema_version: {version!r}")
        feats = []
        for entry in data["features"]:
            feats.append(
                FeatureSpec(
                    name=entry["name"],
                    kind=FeatureKind(entry["kind"]),
                    num_range=tuple(entry["num_range"]) if "num_range" in entry else None,
                    categories=tuple(entry["categories"]) if "categories" in entry else None,
                )
            )
        return cls(
            features=tuple(feats),
            label_column=data["label_column"],
            label_values=tuple(data["label_values"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSchema":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"schema file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _try_float(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    if value != value or value in (float("inf"), float("-inf")):
        return None
    return value


DEFAULT_DISCRETE_THRESHOLD = 20


def infer_schema(
    header: Sequence[str],
    rows: Sequence[Sequence[str]],
    label_column: str,
    discrete_threshold: int = DEFAULT_DISCRETE_THRESHOLD,
) -> FeatureSchema:
    """Infer per-column kinds from raw CSV cells.

    A column of non-numeric strings becomes categorical (first-seen category
    order); an all-integral numeric column with at most ``discrete_threshold``
    distinct values becomes discrete; any other numeric column is numeric.
    A column mixing numeric and non-numeric cells is rejected.
    """
    if discrete_threshold < 1:
        raise DataError("discrete_threshold must be >= 1")
    if not rows:
        raise DataError("no data rows")
    width = len(header)
    if len(set(header)) != width:
        raise DataError("duplicate column names in header")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"row {i + 1} has {len(row)} fields, expected {width}")
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header")

    specs: list[FeatureSpec] = []
    label_cells: list[str] = []
    for col, name in enumerate(header):
        cells = [row[col] for row in rows]
        for i, cell in enumerate(cells):
            if cell == "":
                raise DataError(f"missing value at row {i + 1}, column {name!r}")
        if name == label_column:
            label_cells = cells
            continue
        parsed = [_try_float(cell) for cell in cells]
        n_numeric = sum(1 for v in parsed if v is not None)
        if n_numeric == 0:
            seen: list[str] = []
            for cell in cells:
                if cell not in seen:
                    seen.append(cell)
            specs.append(FeatureSpec(name=name, kind=FeatureKind.CATEGORICAL, categories=tuple(seen)))
        elif n_numeric < len(cells):
            raise DataError(f"column {name!r} mixes numeric and non-numeric values")
        else:
            values = [v for v in parsed if v is not None]
            lo, hi = min(values), max(values)
            all_integral = all(float(v).is_integer() for v in values)
            distinct = len(set(values))
            if all_integral and distinct <= discrete_threshold:
                kind = FeatureKind.DISCRETE
            else:
                kind = FeatureKind.NUMERIC
            specs.append(FeatureSpec(name=name, kind=kind, num_range=(lo, hi)))

    # Sorted label values give a row-order-independent class mapping.
    label_values = tuple(sorted(set(label_cells)))
    if len(label_values) < 2:
        raise DataError("label column has fewer than 2 distinct values")
    return FeatureSchema(features=tuple(specs), label_column=label_column, label_values=label_values)
