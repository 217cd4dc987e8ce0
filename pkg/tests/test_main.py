import csv
import json
import os
import shutil
import sys

import pytest
from click.testing import CliRunner
from loguru import logger

# Patch sys.path for local imports if needed
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import main

ANALYSIS = {
    "row": {"variable": "v1", "positive": ["0"], "negative": ["1"]},
    "col": {"variable": "v2", "positive": ["0"], "negative": ["1", "2", "3", "4"]},
}


@pytest.fixture(autouse=True)
def reset_logger():
    yield
    logger.remove()


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, tmp_path, *args):
    return runner.invoke(main.cli, ["--log-dir", str(tmp_path / "logs"), *args])


@pytest.fixture
def table_path(runner, tmp_path):
    path = tmp_path / "table.json"
    result = invoke(runner, tmp_path, "fixture", "--cells", "2000", "--seed", "4", "-o", str(path))
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def dense_table_path(tmp_path):
    # 10 x 10 table with every cell >= 20 so 2x2 marginals never hit zero
    path = tmp_path / "dense.json"
    payload = {
        "schema": {
            "variables": [
                {"name": "v1", "categories": [str(i) for i in range(10)]},
                {"name": "v2", "categories": [str(i) for i in range(10)]},
            ]
        },
        "counts": [20 + (i * 7) % 13 for i in range(100)],
    }
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_setup_logging_creates_log_dir(tmp_path):
    log_dir = tmp_path / "logs"
    if log_dir.exists():
        shutil.rmtree(log_dir)
    main.setup_logging(log_dir)
    assert log_dir.exists(), "Log directory should be created by setup_logging()"


def test_aggregate(runner, tmp_path):
    records = tmp_path / "records.csv"
    records.write_text("sex,region\nf,n\nm,s\nf,n\n", encoding="utf-8")
    out = tmp_path / "table.json"
    result = invoke(runner, tmp_path, "aggregate", str(records), "-o", str(out))
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text(encoding="utf-8"))["counts"] == [2, 0, 0, 1]


def test_synthesize_and_risk(runner, tmp_path, table_path):
    ensemble = tmp_path / "ensemble"
    result = invoke(
        runner, tmp_path, "synthesize", str(table_path), "--sigma", "0.5", "-m", "5", "--seed", "7", "-o", str(ensemble)
    )
    assert result.exit_code == 0, result.output
    assert (ensemble / "manifest.json").exists()

    risk_csv = tmp_path / "risk.csv"
    result = invoke(
        runner, tmp_path, "risk", "--table", str(table_path), "--ensemble", str(ensemble),
        "--band", "1:0.5", "--k", "2", "--d", "0.5", "-o", str(risk_csv),
    )
    assert result.exit_code == 0, result.output
    with open(risk_csv, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [(r["k"], r["d"]) for r in rows] == [("1", "0.5"), ("2", "0.5")]
    assert all(r["mode"] == "empirical" and r["m"] == "5" for r in rows)


def test_synthesize_csv_format(runner, tmp_path, table_path):
    out = tmp_path / "ens.csv"
    result = invoke(runner, tmp_path, "synthesize", str(table_path), "-m", "2", "--format", "csv", "-o", str(out))
    assert result.exit_code == 0, result.output
    assert out.read_text(encoding="utf-8").startswith("cell_index,rep_1,rep_2\n")
    assert (tmp_path / "ens.manifest.json").exists()


def test_risk_analytic(runner, tmp_path, table_path):
    out = tmp_path / "analytic.csv"
    report = tmp_path / "analytic.json"
    result = invoke(
        runner, tmp_path, "risk", "--analytic", "--table", str(table_path), "--sigma", "0.5", "-m", "20",
        "--band", "1:0.1", "--lattice-correction", "-o", str(out), "--json", str(report),
    )
    assert result.exit_code == 0, result.output
    assert json.loads(report.read_text(encoding="utf-8"))["mode"] == "analytic"


def test_undefined_metric_exit_code(runner, tmp_path, table_path):
    out = tmp_path / "risk.csv"
    result = invoke(runner, tmp_path, "risk", "--analytic", "--table", str(table_path), "--band", "0:0.5", "-o", str(out))
    assert result.exit_code == main.EXIT_UNDEFINED
    assert out.exists()


@pytest.mark.parametrize(
    "args",
    [
        ["risk", "--band", "1:0.5"],
        ["risk", "--analytic", "--band", "one"],
    ],
)
def test_validation_exit_code(runner, tmp_path, args):
    result = invoke(runner, tmp_path, *args)
    assert result.exit_code == main.EXIT_VALIDATION


def test_synthesize_rejects_negative_sigma(runner, tmp_path, table_path):
    result = invoke(runner, tmp_path, "synthesize", str(table_path), "--sigma", "-1", "-o", str(tmp_path / "e"))
    assert result.exit_code == main.EXIT_VALIDATION


def test_utility_and_analyze(runner, tmp_path, dense_table_path):
    ensemble = tmp_path / "ensemble"
    result = invoke(runner, tmp_path, "synthesize", str(dense_table_path), "--sigma", "0.1", "-m", "3", "-o", str(ensemble))
    assert result.exit_code == 0, result.output
    analysis = tmp_path / "analysis.json"
    analysis.write_text(json.dumps(ANALYSIS), encoding="utf-8")

    utility_csv = tmp_path / "utility.csv"
    result = invoke(
        runner, tmp_path, "utility", str(dense_table_path), str(ensemble), "--analysis", str(analysis), "-o", str(utility_csv)
    )
    assert result.exit_code == 0, result.output
    with open(utility_csv, newline="", encoding="utf-8") as f:
        (row,) = list(csv.DictReader(f))
    assert 0 <= float(row["ci_overlap"]) <= 1
    assert "pct_diff_q0.5" in row

    estimate = tmp_path / "estimate.json"
    result = invoke(
        runner, tmp_path, "analyze", str(ensemble), str(analysis), "--mode", "averaged", "--estimator", "ts",
        "--table", str(dense_table_path), "-o", str(estimate), "--append-csv", str(tmp_path / "estimates.csv"),
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(estimate.read_text(encoding="utf-8"))
    assert payload["estimate"]["estimator"] == "Ts"
    assert payload["estimate"]["dof"] == "inf"
    assert "ci_overlap" in payload
    assert "interval" not in payload["estimate"]
    assert payload["estimate"]["lower"] < payload["estimate"]["q_bar"] < payload["estimate"]["upper"]

    result = invoke(
        runner, tmp_path, "analyze", str(ensemble), str(analysis), "-o", str(tmp_path / "tp.json"),
        "--append-csv", str(tmp_path / "estimates.csv"),
    )
    assert result.exit_code == 0, result.output
    with open(tmp_path / "estimates.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == main.ANALYZE_COLUMNS
    assert [r["estimator"] for r in rows] == ["Ts", "Tp"]
    assert all(r["sigma"] == "0.1" for r in rows)


def test_analyze_rejects_mismatched_estimator(runner, tmp_path, dense_table_path):
    ensemble = tmp_path / "ensemble"
    invoke(runner, tmp_path, "synthesize", str(dense_table_path), "-m", "2", "-o", str(ensemble))
    analysis = tmp_path / "analysis.json"
    analysis.write_text(json.dumps(ANALYSIS), encoding="utf-8")
    result = invoke(runner, tmp_path, "analyze", str(ensemble), str(analysis), "--mode", "separate", "--estimator", "ts")
    assert result.exit_code == main.EXIT_VALIDATION


def test_tradeoff_is_byte_identical(runner, tmp_path, table_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        result = invoke(
            runner, tmp_path, "tradeoff", str(table_path), "--sigmas", "0,0.5,2", "--ms", "1,2,5",
            "--band", "1:0.5", "--seed", "3", "--workers", "2", "-o", str(out),
        )
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    header = outputs[0].decode("utf-8").splitlines()[0]
    assert header == ",".join(main.TRADEOFF_COLUMNS)


def test_tradeoff_analytic_with_grid_file(runner, tmp_path, table_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"sigmas": [0.1, 2.0], "ms": [1, 10], "bands": [[1, 0.1]], "risk_metric": "tau3"}))
    out = tmp_path / "analytic.csv"
    front = tmp_path / "front.csv"
    result = invoke(runner, tmp_path, "tradeoff", str(table_path), "--grid", str(grid), "--analytic", "-o", str(out), "--front", str(front))
    assert result.exit_code == 0, result.output
    with open(out, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 4
    assert all(r["provenance"] == "analytic" and r["utility"] == "" for r in rows)
    # no utilities, so no front
    assert not front.exists()


def test_fixture_rejects_spectrum_with_wrong_total(runner, tmp_path):
    spectrum = tmp_path / "spectrum.json"
    spectrum.write_text(json.dumps({"proportions": {"0": 0.25, "1": 0.25}}), encoding="utf-8")
    result = invoke(runner, tmp_path, "fixture", "--cells", "100", "--spectrum", str(spectrum), "-o", str(tmp_path / "t.json"))
    assert result.exit_code == main.EXIT_VALIDATION
