import csv
import io
import json
import os

import pytest

from harstack.cli import ExperimentConfig, build_parser, main

FAST_STACK = ["--pca", "10", "--et-estimators", "5", "--gb-estimators", "3", "--svm-epochs", "3"]


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def report(out_dir):
    with open(os.path.join(out_dir, "report.json")) as fh:
        return json.load(fh)


def without_timings(out_dir):
    body = report(out_dir)
    body.pop("timings")
    return json.dumps(body, sort_keys=True)


def test_help_lists_commands():
    text = build_parser().format_help()
    for verb in ("pca-sweep", "compare-forests", "stack"):
        assert verb in text


def test_pca_sweep_grid(fake_har_dir, tmp_path, capsys):
    out = str(tmp_path / "sweep")
    rc, _, err = run(["pca-sweep", "--data-dir", fake_har_dir, "--out", out, "--pca", "10,none",
                      "--tree-estimators", "3", "--gb-estimators", "2", "--svm-epochs", "2"], capsys)
    assert rc == 0, err
    grid = report(out)["results"]["grid"]
    assert len(grid) == 2 * 9
    implemented = [r for r in grid if r["status"] == "ok"]
    assert len(implemented) == 16
    assert {r["pca"] for r in grid} == {"10", "False"}
    assert all(0 <= r["accuracy"] <= 1 for r in implemented)
    assert all(r["status"] == "not-implemented" for r in grid if r["model"] == "svm_rbf")
    with open(os.path.join(out, "accuracy_grid.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["model", "pca", "accuracy"]
    assert len(rows) == 18


def test_pca_sweep_with_cv(fake_har_dir, capsys):
    rc, out, err = run(["pca-sweep", "--data-dir", fake_har_dir, "--pca", "none",
                        "--models", "knn,cart", "--cv", "--k", "3", "--repeats", "2"], capsys)
    assert rc == 0, err
    grid = json.loads(out)["results"]["grid"]
    cv_rows = [r for r in grid if "cv" in r]
    assert len(cv_rows) == 2 and all(len(r["cv"]["fold_scores"]) == 6 for r in cv_rows)


def test_compare_forests(fake_har_dir, tmp_path, capsys):
    out = str(tmp_path / "forests")
    rc, _, err = run(["compare-forests", "--data-dir", fake_har_dir, "--out", out,
                      "--pca", "10,none", "--forest-estimators", "4", "--k", "3", "--repeats", "1"], capsys)
    assert rc == 0, err
    body = report(out)
    for setting in ("with_pca", "without_pca"):
        for kind in ("random_forest", "extra_trees"):
            entry = body["results"][setting][kind]
            assert 0 <= entry["test_accuracy"] <= 1
            assert len(entry["cv"]["fold_scores"]) == 3
            assert body["timings"][setting][kind]["fit_seconds"] > 0
        assert isinstance(body["timings"][setting]["extra_trees_fit_faster"], bool)


def test_stack_report_and_roc_csv(fake_har_dir, tmp_path, capsys):
    out = str(tmp_path / "stack")
    rc, printed, err = run(["stack", "--data-dir", fake_har_dir, "--out", out, "--repeats", "0"]
                           + FAST_STACK, capsys)
    assert rc == 0, err
    assert sorted(os.path.basename(p) for p in printed.split()) == ["report.json", "roc.csv"]
    res = report(out)["results"]
    counts = res["confusion_matrix"]["counts"]
    assert len(counts) == 6 and sum(map(sum, counts)) == 90
    assert res["classification_report"]["per_class"][5]["class"] == "LAYING"
    assert len(res["base_learner_test_accuracy"]) == 4
    assert "cv" not in res
    with open(os.path.join(out, "roc.csv")) as fh:
        rows = list(csv.DictReader(fh))
    sections = {}
    for row in rows:
        sections.setdefault(row["class"], []).append((float(row["fpr"]), float(row["tpr"])))
    assert len(sections) == 6
    assert all(points[0] == (0.0, 0.0) and points[-1] == (1.0, 1.0) for points in sections.values())


def test_stack_with_cv(fake_har_dir, capsys):
    rc, out, err = run(["stack", "--data-dir", fake_har_dir, "--k", "2", "--repeats", "1"]
                       + FAST_STACK, capsys)
    assert rc == 0, err
    assert len(json.loads(out)["results"]["cv"]["fold_scores"]) == 2


def test_reports_reproducible_apart_from_timings(fake_har_dir, tmp_path, capsys):
    args = ["stack", "--data-dir", fake_har_dir, "--repeats", "0", "--seed", "3"] + FAST_STACK
    assert run(args + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert run(args + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    assert without_timings(tmp_path / "a") == without_timings(tmp_path / "b")
    with open(tmp_path / "a" / "roc.csv", "rb") as a, open(tmp_path / "b" / "roc.csv", "rb") as b:
        assert a.read() == b.read()


def test_report_is_self_describing(fake_har_dir, capsys):
    rc, out, _ = run(["stack", "--data-dir", fake_har_dir, "--repeats", "0", "--seed", "9"]
                     + FAST_STACK, capsys)
    body = json.loads(out)
    assert body["meta"]["seed"] == 9 and body["meta"]["package"] == "harstack"
    assert body["config"]["et_estimators"] == 5 and body["config"]["pca"] == [10]


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5, "k": 3, "svm_c": 0.5, "data_dir": "/from/file"}))
    config = ExperimentConfig.resolve("stack", {"k": 4, "seed": None}, str(cfg))
    assert (config.seed, config.k, config.svm_c) == (5, 4, 0.5)
    assert config.data_dir == "/from/file"
    assert config.repeats == 10 and config.pca == [200]
    assert ExperimentConfig.resolve("pca-sweep", {"data_dir": "x"}).pca == [200, 400, None]


def test_data_dir_from_environment(monkeypatch):
    monkeypatch.setenv("HAR_DATA_DIR", "/env/har")
    assert ExperimentConfig.resolve("stack", {}).data_dir == "/env/har"
    assert ExperimentConfig.resolve("stack", {"data_dir": "/flag"}).data_dir == "/flag"


def test_documented_defaults():
    c = ExperimentConfig()
    assert (c.svm_c, c.gb_estimators, c.gb_learning_rate) == (2.0, 50, 0.2)
    assert (c.et_estimators, c.et_max_depth, c.forest_estimators) == (100, 4, 200)
    assert (c.k, c.repeats, c.split_ratio, c.knn_k) == (10, 10, 0.5, 5)


def test_missing_data_dir_is_a_single_line_error(tmp_path, capsys):
    rc, out, err = run(["stack", "--data-dir", str(tmp_path / "missing")], capsys)
    assert rc == 1 and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert payload["error"] == "FileNotFoundError"
    assert "archive.ics.uci.edu" in payload["message"]


def test_no_data_dir_at_all(monkeypatch, capsys):
    monkeypatch.delenv("HAR_DATA_DIR", raising=False)
    rc, _, err = run(["pca-sweep"], capsys)
    assert rc == 1 and "HAR_DATA_DIR" in json.loads(err)["message"]


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"sead": 1}')
    rc, _, err = run(["stack", "--config", str(cfg), "--data-dir", "x"], capsys)
    assert rc == 1 and "sead" in json.loads(err)["message"]


def test_bad_pca_value(capsys):
    rc, _, err = run(["stack", "--data-dir", "x", "--pca", "-3"], capsys)
    assert rc == 1 and json.loads(err)["error"] == "ValueError"
