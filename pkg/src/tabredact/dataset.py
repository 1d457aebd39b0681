"""Immutable tabular datasets with CSV ingestion and validation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .schema import FeatureKind, FeatureSchema, FeatureSpec, infer_schema

Row = tuple

_DISPLAY_DECIMALS = 12


def _parse_cell(spec: FeatureSpec, cell: str, where: str):
    if spec.kind is FeatureKind.CATEGORICAL:
        if spec.categories is None or cell not in spec.categories:
            raise DataError(f"{where}: value {cell!r} not a known category of {spec.name!r}")
        return cell
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"{where}: value {cell!r} is not numeric for {spec.name!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise DataError(f"{where}: non-finite value for {spec.name!r}")
    if spec.kind is FeatureKind.DISCRETE:
        if not value.is_integer():
            raise DataError(f"{where}: value {cell!r} is not integral for discrete {spec.name!r}")
        return int(value)
    return value


def validate_row(schema: FeatureSchema, row: Sequence) -> Row:
    """Check a row against the schema and return it as a canonical tuple."""
    if len(row) != len(schema.features):
        raise DataError(f"row has {len(row)} values, schema has {len(schema.features)} features")
    out = []
    for spec, value in zip(schema.features, row):
        if spec.kind is FeatureKind.CATEGORICAL:
            if spec.categories is None or value not in spec.categories:
                raise DataError(f"value {value!r} not a known category of {spec.name!r}")
            out.append(value)
            continue
        if isinstance(value, str) or value is None:
            raise DataError(f"feature {spec.name!r} expects a number, got {value!r}")
        fval = float(value)
        if math.isnan(fval) or math.isinf(fval):
            raise DataError(f"non-finite value for feature {spec.name!r}")
        if spec.kind is FeatureKind.DISCRETE:
            if not fval.is_integer():
                raise DataError(f"value {value!r} is not integral for discrete {spec.name!r}")
            out.append(int(fval))
        else:
            out.append(fval)
    return tuple(out)


@dataclass(frozen=True)
class TabularDataset:
    """Schema-conformant rows plus optional class labels.

    Immutable after construction; safe to share across workers.
    """

    schema: FeatureSchema
    rows: tuple[Row, ...]
    labels: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(validate_row(self.schema, r) for r in self.rows))
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.ndim != 1 or len(labels) != len(self.rows):
                raise DataError("labels must be a vector with one entry per row")
            if len(labels) and (labels.min() < 0 or labels.max() >= self.schema.num_classes):
                raise DataError("label index out of range")
            labels.flags.writeable = False
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise DataError("operation requires a labeled dataset")
        return self.labels

    def subset(self, indices: Iterable[int]) -> "TabularDataset":
        idx = list(indices)
        rows = tuple(self.rows[i] for i in idx)
        labels = self.labels[idx] if self.labels is not None else None
        return TabularDataset(self.schema, rows, labels)

    def with_rows(self, extra_rows: Sequence[Row], extra_labels: Sequence[int]) -> "TabularDataset":
        """New dataset with rows appended (labels required on both sides)."""
        labels = self.require_labels()
        new_labels = np.concatenate([labels, np.asarray(extra_labels, dtype=np.int64)])
        return TabularDataset(self.schema, self.rows + tuple(extra_rows), new_labels)

    def class_counts(self) -> np.ndarray:
        labels = self.require_labels()
        return np.bincount(labels, minlength=self.schema.num_classes)

    # -- CSV --------------------------------------------------------------

    @classmethod
    def from_csv(
        cls,
        path: str | Path,
        schema: FeatureSchema | None = None,
        label_column: str | None = None,
        discrete_threshold: int = 20,
    ) -> "TabularDataset":
        """Read an RFC-4180 CSV (header row, UTF-8).

        With no schema, one is inferred; ``label_column`` defaults to the
        last column. Rows with missing cells are rejected.
        """
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            raw_rows = [row for row in reader if row]
        if not raw_rows:
            raise DataError(f"{path}: no data rows")

        if schema is None:
            if label_column is None:
                label_column = header[-1]
            schema = infer_schema(header, raw_rows, label_column, discrete_threshold)
        else:
            label_column = schema.label_column

        for name in [f.name for f in schema.features] + [label_column]:
            if name not in header:
                raise DataError(f"{path}: column {name!r} missing from header")
        col_of = {name: header.index(name) for name in header}
        width = len(header)

        rows: list[Row] = []
        labels: list[int] = []
        for i, raw in enumerate(raw_rows):
            where = f"row {i + 1}"
            if len(raw) != width:
                raise DataError(f"{path}: {where} has {len(raw)} fields, expected {width}")
            values = []
            for spec in schema.features:
                cell = raw[col_of[spec.name]]
                if cell == "":
                    raise DataError(f"{path}: {where}: missing value in column {spec.name!r}")
                values.append(_parse_cell(spec, cell, where))
            rows.append(tuple(values))
            label_cell = raw[col_of[label_column]]
            labels.append(schema.label_index(label_cell))
        return cls(schema, tuple(rows), np.asarray(labels, dtype=np.int64))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f.name for f in self.schema.features] + [self.schema.label_column])
            labels = self.require_labels()
            for row, label in zip(self.rows, labels):
                writer.writerow(format_row(self.schema, row) + [self.schema.label_values[label]])


def format_row(schema: FeatureSchema, row: Row) -> list[str]:
    """Render a row's feature values as CSV cells (stable float formatting)."""
    cells = []
    for spec, value in zip(schema.features, row):
        if spec.kind is FeatureKind.CATEGORICAL:
            cells.append(str(value))
        elif spec.kind is FeatureKind.DISCRETE:
            cells.append(str(int(value)))
        else:
            cells.append(repr(round(float(value), _DISPLAY_DECIMALS)))
    return cells
