"""End-to-end disinformation generation.

Stages: pick base rows of other classes nearest the target, interpolate a
watermark grid toward the target, optionally add sampler draws, build the
conservative boundary from the top cross-validated labelers, then greedily
emit the closest candidates that confidently sit on the other side.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .boundary import (
    AbstainMode,
    EMConfig,
    PDB,
    build_label_matrix,
    fit_label_model,
)
from .dataset import Row, TabularDataset, format_row, validate_row
from .encoding import dataset_encoder, encoded_matrix
from .errors import ConfigError, DataError
from .labelers import LabelerSpec, default_zoo, rank_specs_arrays, train_arrays
from .neighbors import nearest_examples
from .realism import build_pair_index
from .samplers import sample_candidates
from .seeding import derive_seed
from .watermark import Candidate, generate_watermark_candidates


@dataclass(frozen=True)
class DisinfoConfig:
    """Knobs for one redaction run."""

    n_disinfo: int
    seed: int
    grid_resolution: int = 20
    n_generated: int = 0
    alpha: float = 0.95
    beta: float = 0.1
    top_k: int = 5
    cv_folds: int = 5
    sampler: str = "perturb"
    oversample: int = 10
    abstain_mode: AbstainMode = AbstainMode.MARGIN
    zoo: tuple[LabelerSpec, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_disinfo < 1:
            raise ConfigError("n_disinfo must be >= 1")
        if self.grid_resolution < 1:
            raise ConfigError("grid_resolution must be >= 1")
        if not (0.5 <= self.alpha < 1.0):
            raise ConfigError("alpha must lie in [0.5, 1)")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")
        if self.n_generated < 0:
            raise ConfigError("n_generated must be >= 0")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")
        if self.oversample < 1:
            raise ConfigError("oversample must be >= 1")
        object.__setattr__(self, "abstain_mode", AbstainMode(self.abstain_mode))
        if self.zoo is not None:
            object.__setattr__(self, "zoo", tuple(self.zoo))

    def resolved_zoo(self) -> list[LabelerSpec]:
        return list(self.zoo) if self.zoo is not None else default_zoo()

    def with_seed(self, seed: int) -> "DisinfoConfig":
        return replace(self, seed=int(seed))

    def with_n(self, n_disinfo: int) -> "DisinfoConfig":
        return replace(self, n_disinfo=int(n_disinfo))


@dataclass
class DisinfoStats:
    """Candidate counts at each pipeline stage plus the shortfall flag."""

    n_bases: int = 0
    base_shortfall: bool = False
    n_watermark: int = 0
    n_sampled: int = 0
    pool_size: int = 0
    n_eligible: int = 0
    n_selected: int = 0
    shortfall: bool = False

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class DisinfoResult:
    """Selected disinformation rows for one target, nearest first."""

    selected: list[Candidate]
    target: Row
    target_class: int
    stats: DisinfoStats

    @property
    def rows(self) -> list[Row]:
        return [c.row for c in self.selected]

    @property
    def assigned_labels(self) -> list[int]:
        return [int(c.assigned_label) for c in self.selected]

    def __len__(self) -> int:
        return len(self.selected)


@dataclass
class PDBBuildInfo:
    cv_scores: list[tuple[str, float]]
    top_names: list[str]


def build_pdb(dataset: TabularDataset, config: DisinfoConfig) -> tuple[PDB, PDBBuildInfo]:
    """Train the zoo, keep the top-k by CV accuracy, and fit the label model.

    The boundary uses only the top-k labelers' votes end to end. Deterministic
    given (dataset, config.seed).
    """
    X = encoded_matrix(dataset)
    y = dataset.require_labels()
    num_classes = dataset.schema.num_classes
    zoo = [
        spec.with_seed(derive_seed(config.seed, "zoo", spec.name))
        for spec in config.resolved_zoo()
    ]
    if config.top_k > len(zoo):
        raise ConfigError(f"top_k={config.top_k} exceeds zoo size {len(zoo)}")
    ranked = rank_specs_arrays(
        zoo, X, y, num_classes, config.cv_folds,
        fold_seed=derive_seed(config.seed, "cv_folds"),
    )
    top = ranked[: config.top_k]
    labelers = tuple(train_arrays(spec, X, y, num_classes) for spec, _ in top)
    matrix = build_label_matrix(list(labelers), X, config.beta, config.abstain_mode)
    params = fit_label_model(matrix, num_classes, EMConfig())
    pdb = PDB(params, labelers, config.alpha, config.beta, config.abstain_mode)
    info = PDBBuildInfo(
        cv_scores=[(spec.name, score) for spec, score in ranked],
        top_names=[spec.name for spec, _ in top],
    )
    return pdb, info


def select_disinformation(
    candidates: Sequence[Candidate],
    target: Row,
    pdb: PDB,
    target_class: int,
    n_disinfo: int,
    encoder,
) -> DisinfoResult:
    """Greedy closest-first selection under the boundary constraint.

    Equivalent to sorting eligible candidates by distance and taking the
    first n_disinfo, since eligibility is per-candidate. Runs out of
    eligible rows -> partial result with the shortfall flag set, never an
    exception.
    """
    stats = DisinfoStats(pool_size=len(candidates))
    target_row = tuple(target)
    selected: list[Candidate] = []
    if candidates:
        X = np.stack([encoder.encode_row(c.row) for c in candidates])
        posteriors = pdb.posterior_matrix(X)
        from .boundary import crossing_mask

        eligible = crossing_mask(posteriors, target_class, pdb.alpha)
        for i, c in enumerate(candidates):
            if c.row == target_row:
                eligible[i] = False
        stats.n_eligible = int(eligible.sum())
        order = sorted(np.flatnonzero(eligible), key=lambda i: (candidates[i].distance_to_target, i))
        for i in order[:n_disinfo]:
            cand = candidates[i]
            selected.append(
                Candidate(
                    row=cand.row,
                    provenance=cand.provenance,
                    distance_to_target=cand.distance_to_target,
                    assigned_label=int(np.argmax(posteriors[i])),
                )
            )
    stats.n_selected = len(selected)
    stats.shortfall = len(selected) < n_disinfo
    return DisinfoResult(selected=selected, target=tuple(target), target_class=target_class,
                         stats=stats)


def redact(
    dataset: TabularDataset,
    target: Row,
    target_class: int,
    config: DisinfoConfig,
    pdb: PDB | None = None,
) -> DisinfoResult:
    """Full pipeline for one target. Deterministic given (data, config).

    A prebuilt boundary can be passed in when redacting many targets of the
    same dataset; building it here with the same config yields the identical
    boundary, so results do not change.
    """
    schema = dataset.schema
    target = validate_row(schema, target)
    if not (0 <= target_class < schema.num_classes):
        raise DataError(f"target class {target_class} out of range")
    encoder = dataset_encoder(dataset)

    bases = nearest_examples(dataset, target, config.n_disinfo, exclude_class=target_class)
    base_rows = [row for row, _, _ in bases]
    pool: list[Candidate] = []
    if base_rows:
        pool.extend(
            generate_watermark_candidates(
                base_rows, target, config.grid_resolution, schema, encoder)
        )
    n_watermark = len(pool)

    sampled: list[Candidate] = []
    if config.n_generated > 0:
        sampled = sample_candidates(
            config.sampler, dataset, target, config.n_generated,
            seed=derive_seed(config.seed, "sampler"),
            oversample=config.oversample,
            pair_index=build_pair_index(dataset),
        )
        pool.extend(sampled)

    if pdb is None:
        pdb, _ = build_pdb(dataset, config)

    result = select_disinformation(pool, target, pdb, target_class,
                                   config.n_disinfo, encoder)
    result.stats.n_bases = len(base_rows)
    result.stats.base_shortfall = bases.shortfall
    result.stats.n_watermark = n_watermark
    result.stats.n_sampled = len(sampled)
    return result


def write_disinfo_csv(
    results: Sequence[DisinfoResult], schema, path: str | Path
) -> None:
    """Rows as CSV in the input schema plus provenance columns."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = [f.name for f in schema.features]
        header += [schema.label_column, "_target_index", "_provenance", "_gamma", "_distance"]
        writer.writerow(header)
        for t_index, result in enumerate(results):
            for cand in result.selected:
                cells = format_row(schema, cand.row)
                cells.append(schema.label_values[int(cand.assigned_label)])
                cells.append(str(t_index))
                cells.append(cand.provenance.kind)
                gamma = cand.provenance.gamma
                cells.append("" if gamma is None else repr(round(gamma, 12)))
                cells.append(repr(round(cand.distance_to_target, 12)))
                writer.writerow(cells)
