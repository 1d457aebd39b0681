import json
from pathlib import Path

import pytest

from tabredact.cli import main
from tabredact.datagen import make_mixture_dataset
from tabredact.schema import FeatureSchema

SMALL_ZOO_JSON = [
    {"name": "z_nb", "family": "naive_bayes"},
    {"name": "z_lr", "family": "logistic_regression",
     "params": {"learning_rate": 0.05, "epochs": 50}},
    {"name": "z_dt", "family": "decision_tree", "params": {"max_depth": 5}},
]
SMALL_VICTIMS_JSON = [
    {"name": "v_knn", "family": "knn", "params": {"k": 5}},
    {"name": "v_nb", "family": "naive_bayes"},
]


@pytest.fixture(scope="module")
def fixture_csv(tmp_path_factory):
    # cleanly separated blobs: nearest other-class rows are genuine, so
    # watermark candidates reliably cross the boundary
    path = tmp_path_factory.mktemp("data") / "mixture.csv"
    data = make_mixture_dataset(600, seed=5, class_sep=8.0, n_numeric=3, n_categorical=1)
    data.to_csv(path)
    return path


def base_config(fixture_csv, out, **extra):
    cfg = {
        "config_version": 1,
        "dataset": str(fixture_csv),
        "seed": 1234,
        "targets": {"random": 2},
        "disinfo": {
            "n_disinfo": 5,
            "grid_resolution": 8,
            "n_generated": 4,
            "top_k": 2,
            "cv_folds": 3,
            "zoo": SMALL_ZOO_JSON,
        },
        "eval": {
            "holdout_fraction": 0.2,
            "repeats": 1,
            "victims": SMALL_VICTIMS_JSON,
        },
        "out": str(out),
    }
    cfg.update(extra)
    return cfg


def write_config(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=2))
    return path


def read_all_outputs(out_dir: Path, exclude=("timings.json",)) -> dict[str, bytes]:
    return {
        p.name: p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file() and p.name not in exclude
    }


# -- schema --------------------------------------------------------------------


def test_schema_command_writes_file(tmp_path, fixture_csv):
    out = tmp_path / "schema.json"
    assert main(["schema", str(fixture_csv), "--out", str(out)]) == 0
    schema = FeatureSchema.load(out)
    assert schema.num_classes == 2
    assert len(schema.features) == 4


def test_schema_command_ragged_csv_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,y\n1,2,x\n1,2\n")
    out = tmp_path / "schema.json"
    assert main(["schema", str(bad), "--out", str(out)]) == 2
    assert "row 2" in capsys.readouterr().err


def test_schema_round_trips_kinds(tmp_path, fixture_csv):
    out1 = tmp_path / "s1.json"
    main(["schema", str(fixture_csv), "--out", str(out1)])
    schema1 = FeatureSchema.load(out1)

    # write a dataset parsed under that schema back out, re-infer, compare kinds
    from tabredact.dataset import TabularDataset

    data = TabularDataset.from_csv(fixture_csv, schema=schema1)
    round_csv = tmp_path / "round.csv"
    data.to_csv(round_csv)
    out2 = tmp_path / "s2.json"
    main(["schema", str(round_csv), "--out", str(out2)])
    schema2 = FeatureSchema.load(out2)
    assert [f.kind for f in schema1.features] == [f.kind for f in schema2.features]


# -- redact ---------------------------------------------------------------------


def test_redact_command_produces_rows(tmp_path, fixture_csv):
    out = tmp_path / "run_out"
    cfg = write_config(tmp_path, base_config(fixture_csv, out))
    assert main(["redact", "--config", str(cfg)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "redact"
    assert report["total_rows"] == 10  # 2 targets x 5 rows
    for entry in report["targets"]:
        assert entry["n_selected"] == 5
        assert entry["stats"]["shortfall"] is False
    lines = (out / "disinfo.csv").read_text().strip().splitlines()
    assert len(lines) == 11  # header + rows
    assert lines[0].endswith("_target_index,_provenance,_gamma,_distance")


def test_redact_reruns_byte_identical(tmp_path, fixture_csv):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    cfg1 = write_config(tmp_path, base_config(fixture_csv, out1), "c1.json")
    assert main(["redact", "--config", str(cfg1)]) == 0
    assert main(["redact", "--config", str(cfg1), "--out", str(out2)]) == 0
    files1, files2 = read_all_outputs(out1), read_all_outputs(out2)
    assert files1.keys() == files2.keys()
    for name in files1:
        assert files1[name] == files2[name], f"{name} differs between reruns"


def test_redact_shortfall_warns_but_succeeds(tmp_path, fixture_csv, capsys):
    out = tmp_path / "short_out"
    cfg_data = base_config(fixture_csv, out)
    # starve the pool: huge budget, minimal grid, very strict alpha
    cfg_data["disinfo"].update({"n_disinfo": 400, "grid_resolution": 1,
                                "n_generated": 0, "alpha": 0.99})
    cfg = write_config(tmp_path, cfg_data)
    assert main(["redact", "--config", str(cfg)]) == 0
    assert "fewer rows" in capsys.readouterr().err
    report = json.loads((out / "report.json").read_text())
    assert any(t["stats"]["shortfall"] for t in report["targets"])


def test_seed_override_changes_outputs(tmp_path, fixture_csv):
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    cfg = write_config(tmp_path, base_config(fixture_csv, out1))
    main(["redact", "--config", str(cfg)])
    main(["redact", "--config", str(cfg), "--seed", "999", "--out", str(out2)])
    r1 = json.loads((out1 / "report.json").read_text())
    r2 = json.loads((out2 / "report.json").read_text())
    assert r1["seed"] == 1234 and r2["seed"] == 999
    assert r1["config_hash"] != r2["config_hash"]


# -- config validation -----------------------------------------------------------


def test_unknown_config_key_exit_3(tmp_path, fixture_csv, capsys):
    cfg_data = base_config(fixture_csv, tmp_path / "x")
    cfg_data["typo_key"] = 1
    cfg = write_config(tmp_path, cfg_data)
    assert main(["redact", "--config", str(cfg)]) == 3
    assert "typo_key" in capsys.readouterr().err


def test_missing_seed_exit_3(tmp_path, fixture_csv):
    cfg_data = base_config(fixture_csv, tmp_path / "x")
    del cfg_data["seed"]
    cfg = write_config(tmp_path, cfg_data)
    assert main(["redact", "--config", str(cfg)]) == 3


def test_bad_config_version_exit_3(tmp_path, fixture_csv):
    cfg_data = base_config(fixture_csv, tmp_path / "x")
    cfg_data["config_version"] = 7
    cfg = write_config(tmp_path, cfg_data)
    assert main(["redact", "--config", str(cfg)]) == 3


def test_unknown_nested_key_exit_3(tmp_path, fixture_csv):
    cfg_data = base_config(fixture_csv, tmp_path / "x")
    cfg_data["eval"]["not_a_key"] = True
    cfg = write_config(tmp_path, cfg_data)
    assert main(["eval", "pdb", "--config", str(cfg)]) == 3


# -- eval kinds -------------------------------------------------------------------


def test_eval_pdb_reports_precision(tmp_path, fixture_csv):
    out = tmp_path / "pdb_out"
    cfg = write_config(tmp_path, base_config(fixture_csv, out))
    assert main(["eval", "pdb", "--config", str(cfg)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "eval_pdb"
    assert len(report["per_class"]) == 2
    for entry in report["per_class"]:
        assert "precision" in entry and "majority_vote_precision" in entry


def test_eval_disinfo_writes_report_and_csv(tmp_path, fixture_csv):
    out = tmp_path / "dis_out"
    cfg = write_config(tmp_path, base_config(fixture_csv, out))
    assert main(["eval", "disinfo", "--config", str(cfg)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert "target_acc_change" in report["metrics"]
    csv_lines = (out / "report.csv").read_text().strip().splitlines()
    assert len(csv_lines) == 1 + 2 * 1  # header + victims x repeats


def test_eval_mia_and_threshold(tmp_path, fixture_csv):
    out = tmp_path / "mia_out"
    cfg_data = base_config(fixture_csv, out)
    cfg_data["targets"] = {"random": 2}
    cfg_data["eval"].update({
        "member_count": 60,
        "n_shadows": 2,
        "victim": {"name": "v_dt", "family": "decision_tree", "params": {"max_depth": 8}},
        "attacks": [{"name": "a_dt", "family": "decision_tree", "params": {"max_depth": 3}},
                     {"name": "a_nb", "family": "naive_bayes"}],
    })
    cfg = write_config(tmp_path, cfg_data)
    assert main(["eval", "mia", "--config", str(cfg)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["mia"]["average"]["overall_after"] is not None
    assert len(report["mia"]["attacks"]) == 2

    out2 = tmp_path / "thr_out"
    assert main(["eval", "mia-threshold", "--config", str(cfg), "--out", str(out2)]) == 0
    thr = json.loads((out2 / "report.json").read_text())
    assert {a["attack"] for a in thr["attacks"]} == {"loss_threshold", "confidence_threshold"}


def test_eval_scale_runs_and_reports(tmp_path, fixture_csv):
    out = tmp_path / "scale_out"
    cfg_data = base_config(fixture_csv, out)
    cfg_data["targets"] = {"random": 1}
    cfg_data["eval"]["scale"] = {"partial_n": 60, "local_k": 200}
    cfg = write_config(tmp_path, cfg_data)
    assert main(["eval", "scale", "--config", str(cfg)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["arms"]) == {"full", "dist_known", "dist_unknown"}
    for arm in report["arms"].values():
        assert 0.0 <= arm["local_accuracy"] <= 100.0
    timings = json.loads((out / "timings.json").read_text())
    assert "speedup_vs_full" in timings


def test_eval_reports_deterministic(tmp_path, fixture_csv):
    out1, out2 = tmp_path / "d1", tmp_path / "d2"
    cfg = write_config(tmp_path, base_config(fixture_csv, out1))
    assert main(["eval", "pdb", "--config", str(cfg)]) == 0
    assert main(["eval", "pdb", "--config", str(cfg), "--out", str(out2)]) == 0
    assert read_all_outputs(out1) == read_all_outputs(out2)
