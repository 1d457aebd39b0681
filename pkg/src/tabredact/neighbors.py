"""Nearest-neighbor scans and partial-data selection around a target."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .dataset import Row, TabularDataset
from .encoding import dataset_encoder, encoded_matrix
from .errors import DataError


class NeighborList(list):
    """List of (row, label, distance) triples; ``shortfall`` is set when
    fewer than the requested k eligible rows existed."""

    shortfall: bool = False


def _distances_to(dataset: TabularDataset, target: Row) -> np.ndarray:
    mat = encoded_matrix(dataset)
    t = dataset_encoder(dataset).encode_row(target)
    diff = mat - t
    return np.einsum("ij,ij->i", diff, diff)


def nearest_examples(
    dataset: TabularDataset,
    target: Row,
    k: int,
    exclude_class: int | None = None,
) -> NeighborList:
    """The k rows nearest to the target in encoded space.

    Ties break by ascending row index. With ``exclude_class`` set, rows of
    that class are ineligible. If fewer than k rows are eligible, all of
    them are returned and the result's ``shortfall`` flag is set.
    """
    if k < 0:
        raise DataError("k must be >= 0")
    labels = dataset.require_labels()
    dists = _distances_to(dataset, target)
    if exclude_class is not None:
        eligible = np.flatnonzero(labels != exclude_class)
    else:
        eligible = np.arange(len(dataset))

    result = NeighborList()
    if k == 0:
        return result
    # stable sort on distance preserves index order for ties
    order = eligible[np.argsort(dists[eligible], kind="stable")]
    take = order[:k]
    for i in take:
        result.append((dataset.rows[i], int(labels[i]), float(dists[i])))
    result.shortfall = len(result) < k
    return result


class PartialStrategy(str, Enum):
    DIST_KNOWN = "dist_known"
    DIST_UNKNOWN = "dist_unknown"


def _quotas(counts: np.ndarray, n: int) -> np.ndarray:
    """Per-class quotas proportional to class counts, summing exactly to n.

    Largest-remainder apportionment; plain round(n * fraction) can fail to
    sum to n, which would break the exact-size contract.
    """
    fractions = counts / counts.sum()
    raw = n * fractions
    quotas = np.floor(raw).astype(np.int64)
    remainder = n - int(quotas.sum())
    if remainder > 0:
        # ties by class index
        order = np.lexsort((np.arange(len(counts)), -(raw - quotas)))
        for c in order[:remainder]:
            quotas[c] += 1
    return quotas


def partial_select(
    dataset: TabularDataset,
    target: Row,
    n: int,
    strategy: PartialStrategy | str,
) -> TabularDataset:
    """Select a target-local subset of a large dataset.

    DIST_KNOWN: the n nearest rows whose class proportions match the full
    dataset's class distribution (per-class quotas, nearest-first within
    each class). DIST_UNKNOWN: per class, the nearest rows until that class
    has n rows.
    """
    strategy = PartialStrategy(strategy)
    if n < 1:
        raise DataError("n must be >= 1")
    labels = dataset.require_labels()
    counts = dataset.class_counts()
    for c, count in enumerate(counts):
        if count == 0:
            raise DataError(f"class {dataset.schema.label_values[c]!r} has zero rows")

    dists = _distances_to(dataset, target)
    order = np.argsort(dists, kind="stable")

    picked: list[int] = []
    if strategy is PartialStrategy.DIST_UNKNOWN:
        for c in range(len(counts)):
            class_order = order[labels[order] == c]
            picked.extend(int(i) for i in class_order[:n])
    else:
        want = min(n, len(dataset))
        quotas = _quotas(counts, want)
        leftovers: list[int] = []
        for c in range(len(counts)):
            class_order = order[labels[order] == c]
            quota = int(quotas[c])
            picked.extend(int(i) for i in class_order[:quota])
            leftovers.extend(int(i) for i in class_order[quota:])
        # a class smaller than its quota leaves a gap; fill with the nearest
        # unused rows so exactly min(n, available) rows come back
        gap = want - len(picked)
        if gap > 0:
            leftovers.sort(key=lambda i: (dists[i], i))
            picked.extend(leftovers[:gap])
    picked.sort()
    return dataset.subset(picked)
