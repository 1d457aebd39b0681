"""Run configuration files: strict parsing, validation, and hashing.

A run config is a single JSON document with a config_version field. Unknown
keys anywhere are errors so typos cannot silently change an experiment.
Every CLI command is a pure function of (config, input files, seed).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .dataset import TabularDataset
from .errors import ConfigError, DataError
from .labelers import LabelerSpec
from .pipeline import DisinfoConfig
from .schema import FeatureKind

CONFIG_VERSION = 1

_TOP_KEYS = {"config_version", "dataset", "schema", "label_column", "seed",
             "targets", "disinfo", "eval", "out"}
_TARGET_KEYS = {"indices", "random", "filter", "limit"}
_DISINFO_KEYS = {"n_disinfo", "grid_resolution", "n_generated", "alpha", "beta",
                 "top_k", "cv_folds", "sampler", "oversample", "abstain_mode", "zoo"}
_EVAL_KEYS = {"holdout_fraction", "repeats", "victims", "victim", "attacks",
              "n_shadows", "member_count", "threshold_modes", "scale"}
_SCALE_KEYS = {"partial_n", "strategies", "local_k"}


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def config_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_CLAUSE = re.compile(r"^\s*(\w+)\s*(==|!=|<=|>=|<|>)\s*(.+?)\s*$")

_OPS = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def _match_filter(dataset: TabularDataset, expr: str) -> list[int]:
    """Row indices matching '&'-joined comparison clauses over feature columns."""
    clauses = []
    for part in expr.split("&"):
        m = _CLAUSE.match(part)
        if not m:
            raise ConfigError(f"bad filter clause: {part!r}")
        name, op, literal = m.groups()
        try:
            col = dataset.schema.feature_index(name)
        except KeyError:
            raise ConfigError(f"filter references unknown feature {name!r}") from None
        spec = dataset.schema.features[col]
        if spec.kind is FeatureKind.CATEGORICAL:
            value: Any = literal
            if op not in ("==", "!="):
                raise ConfigError(f"categorical feature {name!r} supports only == and !=")
        else:
            try:
                value = float(literal)
            except ValueError:
                raise ConfigError(f"filter value {literal!r} is not numeric") from None
        clauses.append((col, _OPS[op], value))
    out = []
    for i, row in enumerate(dataset.rows):
        if all(op(row[col], value) for col, op, value in clauses):
            out.append(i)
    return out


@dataclass
class TargetSelector:
    indices: list[int] | None = None
    random: int | None = None
    filter: str | None = None
    limit: int | None = None

    def resolve(self, dataset: TabularDataset, pool: np.ndarray, rng: np.random.Generator) -> list[int]:
        """Dataset row indices of the selected targets, restricted to ``pool``."""
        pool_set = set(int(i) for i in pool)
        if self.indices is not None:
            for i in self.indices:
                if i not in pool_set:
                    raise ConfigError(f"target index {i} is not in the eligible pool")
            return [int(i) for i in self.indices]
        if self.filter is not None:
            matched = [i for i in _match_filter(dataset, self.filter) if i in pool_set]
            if not matched:
                raise ConfigError(f"filter {self.filter!r} matched no eligible rows")
            if self.limit is not None:
                matched = matched[: self.limit]
            return matched
        count = self.random or 1
        if count > len(pool):
            raise ConfigError(f"cannot pick {count} targets from {len(pool)} rows")
        picked = rng.choice(len(pool), size=count, replace=False)
        return sorted(int(pool[i]) for i in picked)


@dataclass
class EvalOptions:
    holdout_fraction: float = 0.2
    repeats: int = 3
    victims: list[LabelerSpec] | None = None
    victim: LabelerSpec | None = None
    attacks: list[LabelerSpec] | None = None
    n_shadows: int = 8
    member_count: int | None = None
    threshold_modes: tuple[str, ...] = ("loss", "confidence")
    partial_n: int | None = None
    strategies: tuple[str, ...] = ("dist_known", "dist_unknown")
    local_k: int = 10000


@dataclass
class RunConfig:
    raw: dict
    dataset_path: Path
    schema_path: Path | None
    label_column: str | None
    seed: int
    targets: TargetSelector
    disinfo: DisinfoConfig
    eval_options: EvalOptions
    out_dir: Path | None
    hash: str = field(default="")

    def __post_init__(self) -> None:
        if not self.hash:
            self.hash = config_hash(self.raw)


def _parse_specs(entries, where: str) -> list[LabelerSpec]:
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{where} must be a non-empty list of labeler specs")
    return [LabelerSpec.from_dict(e) for e in entries]


def parse_run_config(raw: dict, base_dir: Path) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    if raw.get("config_version") != CONFIG_VERSION:
        raise ConfigError(f"config_version must be {CONFIG_VERSION}")
    if "seed" not in raw:
        raise ConfigError("seed is mandatory (no implicit entropy)")
    if "dataset" not in raw:
        raise ConfigError("dataset path is required")
    seed = int(raw["seed"])

    dataset_path = (base_dir / raw["dataset"]).resolve()
    if not dataset_path.exists():
        raise ConfigError(f"dataset file not found: {dataset_path}")
    schema_path = None
    if raw.get("schema"):
        schema_path = (base_dir / raw["schema"]).resolve()
        if not schema_path.exists():
            raise ConfigError(f"schema file not found: {schema_path}")

    targets_raw = raw.get("targets", {"random": 1})
    _check_keys(targets_raw, _TARGET_KEYS, "targets")
    selector = TargetSelector(
        indices=targets_raw.get("indices"),
        random=targets_raw.get("random"),
        filter=targets_raw.get("filter"),
        limit=targets_raw.get("limit"),
    )

    disinfo_raw = dict(raw.get("disinfo", {}))
    _check_keys(disinfo_raw, _DISINFO_KEYS, "disinfo")
    zoo = None
    if "zoo" in disinfo_raw:
        zoo = tuple(_parse_specs(disinfo_raw.pop("zoo"), "disinfo.zoo"))
    try:
        disinfo = DisinfoConfig(
            n_disinfo=int(disinfo_raw.pop("n_disinfo", 1)),
            seed=seed,
            zoo=zoo,
            **disinfo_raw,
        )
    except TypeError as exc:
        raise ConfigError(f"bad disinfo section: {exc}") from exc

    eval_raw = dict(raw.get("eval", {}))
    _check_keys(eval_raw, _EVAL_KEYS, "eval")
    scale_raw = dict(eval_raw.get("scale", {}))
    _check_keys(scale_raw, _SCALE_KEYS, "eval.scale")
    options = EvalOptions(
        holdout_fraction=float(eval_raw.get("holdout_fraction", 0.2)),
        repeats=int(eval_raw.get("repeats", 3)),
        victims=_parse_specs(eval_raw["victims"], "eval.victims") if "victims" in eval_raw else None,
        victim=LabelerSpec.from_dict(eval_raw["victim"]) if "victim" in eval_raw else None,
        attacks=_parse_specs(eval_raw["attacks"], "eval.attacks") if "attacks" in eval_raw else None,
        n_shadows=int(eval_raw.get("n_shadows", 8)),
        member_count=int(eval_raw["member_count"]) if "member_count" in eval_raw else None,
        threshold_modes=tuple(eval_raw.get("threshold_modes", ("loss", "confidence"))),
        partial_n=int(scale_raw["partial_n"]) if "partial_n" in scale_raw else None,
        strategies=tuple(scale_raw.get("strategies", ("dist_known", "dist_unknown"))),
        local_k=int(scale_raw.get("local_k", 10000)),
    )
    if not (0.0 < options.holdout_fraction < 1.0):
        raise ConfigError("holdout_fraction must lie in (0, 1)")
    if options.repeats < 1:
        raise ConfigError("repeats must be >= 1")
    for mode in options.threshold_modes:
        if mode not in ("loss", "confidence"):
            raise ConfigError(f"unknown threshold mode {mode!r}")

    out_dir = Path(base_dir / raw["out"]).resolve() if raw.get("out") else None
    return RunConfig(
        raw=raw,
        dataset_path=dataset_path,
        schema_path=schema_path,
        label_column=raw.get("label_column"),
        seed=seed,
        targets=selector,
        disinfo=disinfo,
        eval_options=options,
        out_dir=out_dir,
    )


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_run_config(raw, path.parent)


def load_dataset(config: RunConfig) -> TabularDataset:
    from .schema import FeatureSchema

    schema = FeatureSchema.load(config.schema_path) if config.schema_path else None
    try:
        return TabularDataset.from_csv(
            config.dataset_path, schema=schema, label_column=config.label_column)
    except DataError:
        raise
