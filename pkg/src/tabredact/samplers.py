"""Pluggable candidate samplers standing in for a learned generator.

A sampler draws raw rows near the data manifold; the pipeline then clips,
quantizes, realism-filters, and keeps the draws nearest the target. The
default "perturb" sampler resamples numeric features of random real rows
from per-feature Gaussian kernels (Silverman bandwidths) while keeping the
source row's categorical values, so categorical co-occurrence is realistic
by construction.
"""

from __future__ import annotations

import numpy as np

from .dataset import Row, TabularDataset
from .encoding import dataset_encoder
from .errors import ConfigError, DataError
from .realism import PairIndex, build_pair_index, clip_quantize, is_realistic
from .schema import FeatureKind
from .watermark import Candidate, Provenance


class Sampler:
    """Interface: draw ``count`` raw rows loosely near the data manifold."""

    name = "base"

    def sample(self, dataset: TabularDataset, target: Row, count: int,
               rng: np.random.Generator) -> list[Row]:  # pragma: no cover - abstract
        raise NotImplementedError


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(std, IQR / 1.34) * n^(-1/5), with the IQR dropped when zero."""
    n = len(values)
    if n < 2:
        return 0.0
    std = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    scale = min(std, iqr / 1.34) if iqr > 0 else std
    return 0.9 * scale * n ** (-1.0 / 5.0)


class PerturbSampler(Sampler):
    """Gaussian-kernel perturbation of uniformly chosen real rows."""

    name = "perturb"

    def sample(self, dataset, target, count, rng):
        n = len(dataset)
        if n == 0:
            raise DataError("cannot sample from an empty dataset")
        schema = dataset.schema
        numeric_cols = [i for i, s in enumerate(schema.features) if s.is_numeric_like]
        bandwidths = {}
        for i in numeric_cols:
            column = np.asarray([float(r[i]) for r in dataset.rows])
            bandwidths[i] = silverman_bandwidth(column)
        rows: list[Row] = []
        for _ in range(count):
            source = dataset.rows[int(rng.integers(0, n))]
            values = list(source)
            for i in numeric_cols:
                h = bandwidths[i]
                if h > 0:
                    values[i] = float(values[i]) + float(rng.normal(0.0, h))
            rows.append(tuple(values))
        return rows


_SAMPLERS: dict[str, type[Sampler]] = {}


def register_sampler(cls: type[Sampler]) -> type[Sampler]:
    _SAMPLERS[cls.name] = cls
    return cls


register_sampler(PerturbSampler)


def get_sampler(name: str) -> Sampler:
    try:
        return _SAMPLERS[name]()
    except KeyError:
        raise ConfigError(f"unknown sampler {name!r}; registered: {sorted(_SAMPLERS)}") from None


def sample_candidates(
    sampler: Sampler | str,
    dataset: TabularDataset,
    target: Row,
    n_generated: int,
    seed: int,
    oversample: int = 10,
    pair_index: PairIndex | None = None,
) -> list[Candidate]:
    """Draw, realism-filter, and keep the n_generated rows nearest the target.

    Deterministic given the seed. Every returned candidate passes the pair
    index and is a clip_quantize fixed point.
    """
    if n_generated < 0:
        raise DataError("n_generated must be >= 0")
    if n_generated == 0:
        return []
    if oversample < 1:
        raise DataError("oversample must be >= 1")
    if isinstance(sampler, str):
        sampler = get_sampler(sampler)
    if pair_index is None:
        pair_index = build_pair_index(dataset)
    schema = dataset.schema
    encoder = dataset_encoder(dataset)
    target_vec = encoder.encode_row(target)
    target_row = tuple(target)

    rng = np.random.default_rng(seed)
    raw = sampler.sample(dataset, target, n_generated * oversample, rng)
    kept: list[Candidate] = []
    for draw_index, row in enumerate(raw):
        fixed = clip_quantize(row, schema)
        if fixed == target_row or not is_realistic(fixed, pair_index, schema):
            continue
        diff = encoder.encode_row(fixed) - target_vec
        kept.append(
            Candidate(
                row=fixed,
                provenance=Provenance("sampled", draw_index=draw_index),
                distance_to_target=float(diff @ diff),
            )
        )
    kept.sort(key=lambda c: (c.distance_to_target, c.provenance.draw_index))
    return kept[:n_generated]
