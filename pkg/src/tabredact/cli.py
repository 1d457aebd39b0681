"""Command-line front door.

Commands: ``schema`` (infer a schema file from CSV), ``redact`` (generate
disinformation for configured targets), and ``eval pdb|disinfo|mia|
mia-threshold|scale`` (the evaluation harnesses). Every command is a pure
function of (config file, input files, seed); reruns produce byte-identical
outputs. The one exception is the scale evaluation's wall-clock measurements,
which go to a separate timings file excluded from that guarantee.

Exit codes: 0 success (including shortfalls, which warn), 1 internal error,
2 bad input data, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .attack import eval_disinfo, shokri_mia, threshold_mia
from .boundary import majority_vote_precision, pdb_precision
from .config import EvalOptions, RunConfig, load_dataset, load_run_config
from .dataset import TabularDataset
from .encoding import dataset_encoder, encoded_matrix
from .errors import ConfigError, DataError, TabRedactError
from .labelers import LabelerFamily, LabelerSpec, default_attack_specs, default_victims
from .neighbors import partial_select
from .pipeline import DisinfoConfig, build_pdb, redact, write_disinfo_csv
from .schema import infer_schema
from .seeding import derive_seed

REPORT_VERSION = 1

DEFAULT_MIA_VICTIM = LabelerSpec(
    "v_wide_mlp", LabelerFamily.MLP,
    {"hidden": (128, 64), "activation": "relu", "learning_rate": 3e-3,
     "epochs": 200, "batch_size": 64},
)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _report_skeleton(command: str, config: RunConfig) -> dict:
    return {
        "report_version": REPORT_VERSION,
        "command": command,
        "config_hash": config.hash,
        "seed": config.seed,
    }


def _split_train_holdout(dataset: TabularDataset, fraction: float, seed: int):
    rng = np.random.default_rng(derive_seed(seed, "holdout_split"))
    order = rng.permutation(len(dataset))
    n_holdout = max(1, int(round(fraction * len(dataset))))
    holdout_idx = np.sort(order[:n_holdout])
    train_idx = np.sort(order[n_holdout:])
    return dataset.subset(train_idx), dataset.subset(holdout_idx), train_idx, holdout_idx


def _redact_task(args):
    dataset, row, target_class, config, pdb = args
    return redact(dataset, row, target_class, config, pdb=pdb)


def _redact_targets(dataset, target_indices, disinfo_config, pdb, jobs: int):
    labels = dataset.require_labels()
    tasks = []
    for i, idx in enumerate(target_indices):
        per_target = disinfo_config.with_seed(derive_seed(disinfo_config.seed, "target", i))
        tasks.append((dataset, dataset.rows[idx], int(labels[idx]), per_target, pdb))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_redact_task, tasks))
    return [_redact_task(t) for t in tasks]


# -- commands ----------------------------------------------------------------


def cmd_schema(args) -> int:
    import csv as _csv

    path = Path(args.input)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    label_column = args.label_column or (header[-1] if header else "")
    schema = infer_schema(header, rows, label_column, args.discrete_threshold)
    schema.save(args.out)
    print(f"schema: {len(schema.features)} features, {schema.num_classes} classes -> {args.out}")
    return 0


def _prepare(args, command: str):
    config = load_run_config(args.config)
    if args.seed is not None:
        raw = dict(config.raw)
        raw["seed"] = int(args.seed)
        from .config import parse_run_config

        config = parse_run_config(raw, Path(args.config).parent)
    out_dir = Path(args.out) if args.out else config.out_dir
    if out_dir is None:
        raise ConfigError("no output directory: set 'out' in the config or pass --out")
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, out_dir


def cmd_redact(args) -> int:
    config, out_dir = _prepare(args, "redact")
    dataset = load_dataset(config)
    rng = np.random.default_rng(derive_seed(config.seed, "target_choice"))
    target_indices = config.targets.resolve(dataset, np.arange(len(dataset)), rng)

    pdb, info = build_pdb(dataset, config.disinfo)
    results = _redact_targets(dataset, target_indices, config.disinfo, pdb, args.jobs)

    write_disinfo_csv(results, dataset.schema, out_dir / "disinfo.csv")
    labels = dataset.require_labels()
    target_entries = []
    shortfalls = 0
    for i, (idx, result) in enumerate(zip(target_indices, results)):
        if result.stats.shortfall:
            shortfalls += 1
        target_entries.append({
            "target_index": int(idx),
            "target_class": dataset.schema.label_values[int(labels[idx])],
            "n_selected": len(result),
            "mean_distance": (
                float(np.mean([c.distance_to_target for c in result.selected]))
                if result.selected else None),
            "stats": result.stats.to_dict(),
        })
    report = _report_skeleton("redact", config)
    report.update({
        "cv_scores": [{"labeler": n, "cv_accuracy": s} for n, s in info.cv_scores],
        "boundary_labelers": info.top_names,
        "targets": target_entries,
        "total_rows": int(sum(len(r) for r in results)),
    })
    _write_json(out_dir / "report.json", report)
    if shortfalls:
        print(f"warning: {shortfalls} target(s) received fewer rows than requested",
              file=sys.stderr)
    print(f"redact: {report['total_rows']} rows for {len(results)} target(s) -> {out_dir}")
    return 0


def cmd_eval_pdb(args) -> int:
    config, out_dir = _prepare(args, "eval pdb")
    dataset = load_dataset(config)
    train, holdout, _, _ = _split_train_holdout(
        dataset, config.eval_options.holdout_fraction, config.seed)
    pdb, info = build_pdb(train, config.disinfo)
    X_hold = dataset_encoder(train).transform(holdout.rows)
    y_hold = holdout.require_labels()
    per_class = []
    for c in range(dataset.schema.num_classes):
        precision = pdb_precision(pdb, X_hold, y_hold, c)
        mv = majority_vote_precision(list(pdb.labelers), X_hold, y_hold, c,
                                     pdb.beta, pdb.mode)
        crossing = int(pdb.across_boundary_matrix(X_hold, c).sum())
        per_class.append({
            "target_class": dataset.schema.label_values[c],
            "precision": None if precision is None else 100.0 * precision,
            "majority_vote_precision": None if mv is None else 100.0 * mv,
            "n_crossing": crossing,
        })
    report = _report_skeleton("eval_pdb", config)
    report.update({
        "alpha": pdb.alpha,
        "beta": pdb.beta,
        "abstain_mode": pdb.mode.value,
        "boundary_labelers": info.top_names,
        "cv_scores": [{"labeler": n, "cv_accuracy": s} for n, s in info.cv_scores],
        "per_class": per_class,
        "holdout_rows": len(holdout),
    })
    _write_json(out_dir / "report.json", report)
    print(f"eval pdb: report -> {out_dir / 'report.json'}")
    return 0


def cmd_eval_disinfo(args) -> int:
    config, out_dir = _prepare(args, "eval disinfo")
    dataset = load_dataset(config)
    opts = config.eval_options
    train, holdout, train_idx, _ = _split_train_holdout(
        dataset, opts.holdout_fraction, config.seed)
    rng = np.random.default_rng(derive_seed(config.seed, "target_choice"))
    train_positions = config.targets.resolve(train, np.arange(len(train)), rng)
    targets = train.subset(train_positions)

    pdb, info = build_pdb(train, config.disinfo)
    results = _redact_targets(train, train_positions, config.disinfo, pdb, args.jobs)
    victims = opts.victims if opts.victims is not None else default_victims()
    report_data = eval_disinfo(victims, train, results, targets, holdout,
                               repeats=opts.repeats, seed=config.seed, jobs=args.jobs)

    write_disinfo_csv(results, dataset.schema, out_dir / "disinfo.csv")
    report = _report_skeleton("eval_disinfo", config)
    report.update({
        "boundary_labelers": info.top_names,
        "n_targets": len(targets),
        "disinfo_rows": int(sum(len(r) for r in results)),
        "metrics": report_data.to_dict(),
    })
    _write_json(out_dir / "report.json", report)
    rows = [
        [o.victim, o.repeat, o.test_acc_before, o.test_acc_after, o.test_acc_change,
         o.target_acc_before, o.target_acc_after, o.target_acc_change,
         o.target_conf_before, o.target_conf_after, o.target_conf_change]
        for o in report_data.outcomes
    ]
    _write_csv(out_dir / "report.csv",
               ["victim", "repeat", "test_acc_before", "test_acc_after", "test_acc_change",
                "target_acc_before", "target_acc_after", "target_acc_change",
                "target_conf_before", "target_conf_after", "target_conf_change"], rows)
    mean_change = report_data.target_acc_change[0]
    print(f"eval disinfo: mean target accuracy change {mean_change:+.2f} -> {out_dir}")
    return 0


def _mia_setup(config: RunConfig, dataset: TabularDataset):
    opts = config.eval_options
    n = len(dataset)
    member_count = opts.member_count or max(50, n // 10)
    if member_count >= n:
        raise ConfigError(f"member_count {member_count} must be smaller than the dataset ({n})")
    rng = np.random.default_rng(derive_seed(config.seed, "member_split"))
    order = rng.permutation(n)
    member_indices = np.sort(order[:member_count])
    target_rng = np.random.default_rng(derive_seed(config.seed, "target_choice"))
    target_indices = config.targets.resolve(dataset, member_indices, target_rng)
    return member_indices, target_indices


def _mia_disinfo(config: RunConfig, dataset, target_indices, jobs):
    pdb, _ = build_pdb(dataset, config.disinfo)
    return _redact_targets(dataset, list(target_indices), config.disinfo, pdb, jobs)


def cmd_eval_mia(args) -> int:
    config, out_dir = _prepare(args, "eval mia")
    dataset = load_dataset(config)
    opts = config.eval_options
    member_indices, target_indices = _mia_setup(config, dataset)
    results = _mia_disinfo(config, dataset, target_indices, args.jobs)
    victim = opts.victim or DEFAULT_MIA_VICTIM
    attacks = opts.attacks if opts.attacks is not None else default_attack_specs()
    mia = shokri_mia(
        victim, dataset, member_indices, target_indices,
        n_shadows=opts.n_shadows, attack_specs=attacks,
        seed=config.seed, disinfo=results, repeats=opts.repeats)
    report = _report_skeleton("eval_mia", config)
    report.update({
        "victim": victim.name,
        "n_members": int(len(member_indices)),
        "n_targets": len(target_indices),
        "disinfo_rows": int(sum(len(r) for r in results)),
        "mia": mia.to_dict(),
    })
    _write_json(out_dir / "report.json", report)
    rows = [
        [r.attack, r.overall_before, r.overall_after, r.target_before, r.target_after,
         r.target_change]
        for r in mia.reports + [mia.average]
    ]
    _write_csv(out_dir / "report.csv",
               ["attack", "overall_f1_before", "overall_f1_after",
                "target_acc_before", "target_acc_after", "target_acc_change"], rows)
    avg = mia.average
    print(f"eval mia: target inference accuracy {avg.target_before:.2f} -> "
          f"{avg.target_after:.2f} ({avg.target_change:+.2f}) -> {out_dir}")
    return 0


def cmd_eval_mia_threshold(args) -> int:
    config, out_dir = _prepare(args, "eval mia-threshold")
    dataset = load_dataset(config)
    opts = config.eval_options
    member_indices, target_indices = _mia_setup(config, dataset)
    results = _mia_disinfo(config, dataset, target_indices, args.jobs)
    victim = opts.victim or DEFAULT_MIA_VICTIM
    reports = [
        threshold_mia(victim, dataset, member_indices, target_indices, mode=mode,
                      seed=config.seed, disinfo=results, repeats=opts.repeats)
        for mode in opts.threshold_modes
    ]
    report = _report_skeleton("eval_mia_threshold", config)
    report.update({
        "victim": victim.name,
        "n_members": int(len(member_indices)),
        "n_targets": len(target_indices),
        "disinfo_rows": int(sum(len(r) for r in results)),
        "attacks": [r.to_dict() for r in reports],
    })
    _write_json(out_dir / "report.json", report)
    _write_csv(out_dir / "report.csv",
               ["attack", "overall_auc_before", "overall_auc_after",
                "target_auc_before", "target_auc_after", "target_auc_change"],
               [[r.attack, r.overall_before, r.overall_after, r.target_before,
                 r.target_after, r.target_change] for r in reports])
    summary = ", ".join(f"{r.attack}: target AUC {r.target_change:+.2f}" for r in reports)
    print(f"eval mia-threshold: {summary} -> {out_dir}")
    return 0


def _local_accuracy(pdb, dataset, target_row, k: int) -> float:
    """Mean accuracy of the boundary's labelers on the k nearest rows."""
    X = encoded_matrix(dataset)
    y = dataset.require_labels()
    t = dataset_encoder(dataset).encode_row(target_row)
    diff = X - t
    dists = np.einsum("ij,ij->i", diff, diff)
    near = np.argsort(dists, kind="stable")[: min(k, len(dataset))]
    accs = [labeler.accuracy(X[near], y[near]) for labeler in pdb.labelers]
    return 100.0 * float(np.mean(accs))


def cmd_eval_scale(args) -> int:
    config, out_dir = _prepare(args, "eval scale")
    dataset = load_dataset(config)
    opts = config.eval_options
    if opts.partial_n is None:
        raise ConfigError("eval.scale.partial_n is required for the scale evaluation")
    train, holdout, _, _ = _split_train_holdout(dataset, opts.holdout_fraction, config.seed)
    rng = np.random.default_rng(derive_seed(config.seed, "target_choice"))
    positions = config.targets.resolve(train, np.arange(len(train)), rng)
    targets = train.subset(positions)
    labels = train.require_labels()
    victims = opts.victims if opts.victims is not None else default_victims()

    arms: dict[str, dict] = {}
    timings: dict[str, dict] = {}

    def run_arm(name: str, select_fn):
        per_times, local_accs, all_results = [], [], []
        for i, pos in enumerate(positions):
            row = train.rows[pos]
            c_t = int(labels[pos])
            cfg = config.disinfo.with_seed(derive_seed(config.seed, name, i))
            t0 = time.perf_counter()
            working = select_fn(row)
            pdb, _ = build_pdb(working, cfg)
            result = redact(working, row, c_t, cfg, pdb=pdb)
            per_times.append(time.perf_counter() - t0)
            local_accs.append(_local_accuracy(pdb, train, row, opts.local_k))
            all_results.append(result)
        report = eval_disinfo(victims, train, all_results, targets, holdout,
                              repeats=opts.repeats, seed=config.seed, jobs=args.jobs)
        arms[name] = {
            "local_accuracy": float(np.mean(local_accs)),
            "target_acc_change": report.target_acc_change[0],
            "test_acc_change": report.test_acc_change[0],
            "disinfo_rows": int(sum(len(r) for r in all_results)),
        }
        timings[name] = {
            "per_target_seconds": per_times,
            "mean_seconds": float(np.mean(per_times)),
        }

    run_arm("full", lambda row: train)
    for strategy in opts.strategies:
        run_arm(strategy,
                lambda row, s=strategy: partial_select(train, row, opts.partial_n, s))

    report = _report_skeleton("eval_scale", config)
    report.update({
        "partial_n": opts.partial_n,
        "n_targets": len(positions),
        "arms": arms,
    })
    _write_json(out_dir / "report.json", report)
    timing_payload = {
        "note": "wall-clock measurements; excluded from byte-identical rerun guarantee",
        "arms": timings,
        "speedup_vs_full": {
            name: timings["full"]["mean_seconds"] / max(t["mean_seconds"], 1e-9)
            for name, t in timings.items() if name != "full"
        },
    }
    (out_dir / "timings.json").write_text(
        json.dumps(timing_payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    speedups = ", ".join(f"{k}: {v:.1f}x" for k, v in timing_payload["speedup_vs_full"].items())
    print(f"eval scale: speedups {speedups} -> {out_dir}")
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tabredact",
        description="Targeted disinformation generation and privacy-attack "
                    "evaluation for tabular data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_schema = sub.add_parser("schema", help="infer a schema file from a CSV")
    p_schema.add_argument("input", help="input CSV path")
    p_schema.add_argument("--out", required=True, help="output schema JSON path")
    p_schema.add_argument("--label-column", default=None)
    p_schema.add_argument("--discrete-threshold", type=int, default=20)
    p_schema.set_defaults(func=cmd_schema)

    def add_run_args(p):
        p.add_argument("--config", required=True, help="run config JSON")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p_redact = sub.add_parser("redact", help="generate disinformation for targets")
    add_run_args(p_redact)
    p_redact.set_defaults(func=cmd_redact)

    p_eval = sub.add_parser("eval", help="evaluation harnesses")
    eval_sub = p_eval.add_subparsers(dest="kind", required=True)
    for kind, fn in (("pdb", cmd_eval_pdb), ("disinfo", cmd_eval_disinfo),
                     ("mia", cmd_eval_mia), ("mia-threshold", cmd_eval_mia_threshold),
                     ("scale", cmd_eval_scale)):
        p = eval_sub.add_parser(kind)
        add_run_args(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except TabRedactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
