import os
from pathlib import Path

import pytest

from app.config import ECHO_FILENAME, RunConfig
from app.exception import InvalidParameterError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in list(os.environ):
        if key.startswith("BIOMARKER_"):
            monkeypatch.delenv(key)


def test_resolve_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("BIOMARKER_TOP_K", "7")
    config_file = tmp_path / "run.env"
    config_file.write_text("top_k=9\nfolds=4\n", encoding="utf-8")

    assert RunConfig.resolve().top_k == 7
    from_file = RunConfig.resolve(config_file=config_file)
    assert (from_file.top_k, from_file.folds) == (9, 4)
    assert RunConfig.resolve({"top_k": 11, "folds": None}, config_file=config_file).top_k == 11
    assert RunConfig.resolve({"top_k": 11, "folds": None}, config_file=config_file).folds == 4


def test_resolve_rejects_unknown_keys(tmp_path):
    config_file = tmp_path / "run.env"
    config_file.write_text("top_kk=3\n", encoding="utf-8")

    with pytest.raises(InvalidParameterError, match="top_kk"):
        RunConfig.resolve(config_file=config_file)
    with pytest.raises(InvalidParameterError):
        RunConfig.resolve({"colour": "blue"})


def test_resolve_rejects_missing_config_file(tmp_path):
    with pytest.raises(InvalidParameterError, match="not found"):
        RunConfig.resolve(config_file=tmp_path / "absent.env")


@pytest.mark.parametrize(
    "overrides",
    [{"top_k": "abc"}, {"folds": 1}, {"present_fraction": 0.0}, {"selector": "lasso"}, {"permutations": 0}],
)
def test_resolve_rejects_invalid_values(overrides):
    with pytest.raises(InvalidParameterError):
        RunConfig.resolve(overrides)


def test_resolve_accepts_aliases_and_lists():
    config = RunConfig.resolve({"classifier": "nb", "wrapper_classifier": "dtable", "class_sizes": "8, 9,10"})

    assert config.classifier == "naive_bayes"
    assert config.wrapper_classifier == "decision_table"
    assert config.class_sizes == [8, 9, 10]


def test_materialized_derives_stage_seeds():
    config = RunConfig(seed=10, fold_seed=99).materialized()

    assert config.permutation_seed == 11
    assert config.fold_seed == 99
    assert config.selector_seed == 13
    assert config.classifier_seed == 14
    assert config.synth_seed == 15
    assert config.selector_config().seed == 13
    assert config.permutation_plan().seed == 11


def test_materialized_draws_a_seed_when_unset():
    config = RunConfig().materialized()

    assert isinstance(config.seed, int)
    assert config.synth_seed == config.seed + 5


def test_stage_seed_needs_materialization():
    with pytest.raises(InvalidParameterError, match="materialize"):
        RunConfig().permutation_plan()


def test_echo_round_trip(tmp_path):
    config = RunConfig.resolve(
        {"seed": 3, "selector": "cfs", "classifier": "nb", "class_sizes": "4,5,6", "impute": False, "out_dir": tmp_path}
    ).materialized()

    path = config.write_echo()

    assert path == tmp_path / ECHO_FILENAME
    assert "class_sizes=4,5,6" in path.read_text(encoding="utf-8")
    assert "impute=false" in path.read_text(encoding="utf-8")
    assert RunConfig.resolve(config_file=path) == config


def test_echo_omits_unset_values():
    echo = RunConfig(seed=1).echo()

    assert "input=" not in echo
    assert "seed=1\n" in echo
    assert echo.splitlines() == sorted(echo.splitlines())


def test_synth_spec_spreads_planted_genes():
    spec = RunConfig(seed=1, genes=100, informative=4, class_sizes=[5, 5, 5], effect=1.5).materialized().synth_spec()

    assert [gene.index for gene in spec.informative] == [0, 25, 50, 75]
    assert spec.informative[1].shifts == [0.0, 1.5, 0.0]
    assert spec.informative[3].shifts == [1.5, 0.0, 0.0]
    assert spec.seed == 6
    assert spec.labels == ["HC", "ND", "PD"]


def test_synth_spec_rejects_too_many_planted_genes():
    with pytest.raises(InvalidParameterError):
        RunConfig(seed=1, genes=3, informative=4).synth_spec()


def test_options_are_forwarded():
    config = RunConfig(seed=2, noise_floor=50.0, svm_c=0.5, classifier="lvq").materialized()

    assert config.preprocess_options().noise_floor == 50.0
    assert config.classifier_config().C == 0.5
    assert config.classifier_config().kind == "lvq"
    assert config.out_dir == Path("out")
