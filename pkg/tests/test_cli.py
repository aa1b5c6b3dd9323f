import json
import os

import pytest

from app.cli import main, subcommand_help
from app.libs.corpus import parse_expression_table, read_text
from app.libs.synthgen import read_truth
from app.pipeline import SUBCOMMANDS
from app.steps import RankStep

PIPELINE_FLAGS = [
    "--seed", "1",
    "--genes", "60",
    "--class-sizes", "8,8,8",
    "--informative", "4",
    "--permutations", "50",
    "--selector", "cfs",
    "--classifier", "nb",
    "--folds", "4",
    "--log-level", "WARNING",
]  # fmt: skip

ARTIFACTS = [
    "run_config.env",
    "expression.tsv",
    "calls.tsv",
    "truth.json",
    "preprocessed.tsv",
    "filter_report.tsv",
    "outliers.tsv",
    "transform_summary.tsv",
    "scores.tsv",
    "heatmap.tsv",
    "subset.tsv",
    "report.txt",
    "report.json",
]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    for key in list(os.environ):
        if key.startswith("BIOMARKER_"):
            monkeypatch.delenv(key)


def test_pipeline_writes_every_artifact(tmp_path, capsys):
    out_dir = tmp_path / "run"

    status = main(["pipeline", "--out-dir", str(out_dir), *PIPELINE_FLAGS])

    assert status == 0
    for name in ARTIFACTS:
        assert (out_dir / name).is_file(), name
    report = json.loads((out_dir / "report.json").read_text(encoding="utf-8"))
    assert report["n_instances"] == 24
    assert report["config"]["classifier"] == "naive_bayes"
    assert "seed=1" in (out_dir / "run_config.env").read_text(encoding="utf-8").splitlines()
    assert "error=" not in capsys.readouterr().out


def test_pipeline_is_reproducible(tmp_path):
    assert main(["pipeline", "--out-dir", str(tmp_path / "first"), *PIPELINE_FLAGS]) == 0
    assert main(["pipeline", "--out-dir", str(tmp_path / "second"), *PIPELINE_FLAGS]) == 0

    for name in ("scores.tsv", "subset.tsv", "report.json"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name


def test_echoed_config_reproduces_the_run(tmp_path):
    assert main(["pipeline", "--out-dir", str(tmp_path / "first"), *PIPELINE_FLAGS]) == 0
    echo = tmp_path / "first" / "run_config.env"

    assert main(["pipeline", "--config", str(echo), "--out-dir", str(tmp_path / "second")]) == 0

    first = (tmp_path / "first" / "report.json").read_bytes()
    assert first == (tmp_path / "second" / "report.json").read_bytes()


def test_simulate_then_preprocess(tmp_path):
    sim_dir, pre_dir = tmp_path / "sim", tmp_path / "pre"
    flags = ["--seed", "2", "--genes", "40", "--class-sizes", "4,4,4", "--log-level", "ERROR"]

    assert main(["simulate", "--out-dir", str(sim_dir), *flags]) == 0
    truth = read_truth(read_text(sim_dir / "truth.json"))
    assert len(truth.informative_ids) == 10

    status = main(
        [
            "preprocess",
            "--input", str(sim_dir / "expression.tsv"),
            "--calls", str(sim_dir / "calls.tsv"),
            "--out-dir", str(pre_dir),
            "--noise-floor", "10",
            "--log-level", "ERROR",
        ]
    )  # fmt: skip

    assert status == 0
    matrix = parse_expression_table(read_text(pre_dir / "preprocessed.tsv"), stage="zscore")
    assert matrix.n_samples == 12


def test_invalid_flag_value_is_a_usage_error(tmp_path, capsys):
    status = main(["select", "--out-dir", str(tmp_path), "--top-k", "abc"])

    assert status == 1
    assert capsys.readouterr().out.strip().splitlines()[-1] == "error=E_USAGE exit=1"


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["rank", "--colour", "blue"]) == 1
    assert "error=E_USAGE exit=1" in capsys.readouterr().out


def test_missing_input_is_a_data_error(tmp_path, capsys):
    status = main(["preprocess", "--input", str(tmp_path / "absent.tsv"), "--out-dir", str(tmp_path / "out")])

    assert status == 2
    assert capsys.readouterr().out.strip().splitlines()[-1] == "error=E_DATA exit=2"


def test_uninformative_table_is_an_algorithm_error(tmp_path, capsys):
    table = tmp_path / "flat.tsv"
    table.write_text(
        "ID\tHC_01\tHC_02\tHC_03\tPD_01\tPD_02\tPD_03\ng1_at\t0\t0\t0\t0\t0\t0\ng2_at\t0\t0\t0\t0\t0\t0\n",
        encoding="utf-8",
    )

    status = main(["select", "--input", str(table), "--selector", "cfs", "--seed", "1", "--out-dir", str(tmp_path / "o")])

    assert status == 3
    assert capsys.readouterr().out.strip().splitlines()[-1] == "error=E_ALGORITHM exit=3"


def test_subcommand_help_comes_from_step_descriptions():
    help_text = subcommand_help()

    assert set(help_text) == set(SUBCOMMANDS)
    assert help_text["rank"] == RankStep().description
    assert "--input" in help_text["pipeline"]
