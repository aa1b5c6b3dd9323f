import numpy as np
import pytest

from app.exception import DataFormatError, DataValidationError
from app.libs.corpus import (
    infer_labels,
    label_dataset,
    parse_call_table,
    parse_expression_table,
    parse_label_table,
    read_text,
    render_table,
    write_table,
)
from app.libs.evaluate import nested_cv, stratified_folds
from app.libs.learners import ClassifierConfig
from app.types import DetectionCall, ExpressionMatrix, GeneScore

TABLE = "ID\tHC_01\tND_01\tPD_01\n1007_s_at\t30.72\t215.2\t400\n1053_at\t0\t12.5\t99.9\n"


def test_parse_expression_table_keeps_order():
    matrix = parse_expression_table(TABLE)

    assert matrix.values.shape == (2, 3)
    assert matrix.sample_ids == ["HC_01", "ND_01", "PD_01"]
    assert matrix.probeset_ids == ["1007_s_at", "1053_at"]
    assert matrix.stage == "raw"
    assert matrix.values[0, 0] == 30.72


def test_parse_expression_table_accepts_crlf_and_bom():
    matrix = parse_expression_table("\ufeff" + TABLE.replace("\n", "\r\n"))

    assert matrix.n_probesets == 2
    assert matrix.sample_ids[0] == "HC_01"


def test_parse_expression_table_rejects_duplicate_probeset():
    text = TABLE + "1053_at\t1\t2\t3\n"

    with pytest.raises(DataFormatError, match="1053_at") as info:
        parse_expression_table(text)
    assert info.value.row == 4


@pytest.mark.parametrize(
    ("line", "column", "match"),
    [
        ("x_at\t1\tabc\t3", 3, "non-numeric"),
        ("x_at\t1\t2\t-4", 4, "negative"),
        ("x_at\tnan\t2\t3", 2, "non-finite"),
    ],
)
def test_parse_expression_table_reports_coordinates(line, column, match):
    with pytest.raises(DataFormatError, match=match) as info:
        parse_expression_table(TABLE + line + "\n")
    assert (info.value.row, info.value.column) == (4, column)


def test_parse_expression_table_rejects_ragged_row():
    with pytest.raises(DataFormatError, match="ragged") as info:
        parse_expression_table(TABLE + "x_at\t1\t2\n")
    assert info.value.row == 4


def test_parse_expression_table_allows_negative_after_transform():
    matrix = parse_expression_table("ID\tHC_01\tPD_01\ng_at\t-1.5\t1.5\n", stage="zscore")

    assert matrix.stage == "zscore"
    assert matrix.values.tolist() == [[-1.5, 1.5]]


def test_expression_matrix_rejects_negative_raw_values():
    with pytest.raises(DataValidationError, match="nonnegative"):
        ExpressionMatrix(probeset_ids=["a"], sample_ids=["HC_01"], values=[[-1.0]])


def test_parse_call_table_maps_symbols():
    calls = parse_call_table("ID\tHC_01\tND_01\ng_at\tP\tm\nh_at\tA\tP\n")

    assert calls.call(0, 0) is DetectionCall.PRESENT
    assert calls.call(0, 1) is DetectionCall.MARGINAL
    assert calls.call(1, 0) is DetectionCall.ABSENT


def test_parse_call_table_rejects_unknown_symbol():
    with pytest.raises(DataFormatError, match="'X'") as info:
        parse_call_table("ID\tHC_01\tND_01\ng_at\tP\tX\n")
    assert (info.value.row, info.value.column) == (2, 3)


def test_parse_call_table_reports_duplicate_probeset_line():
    text = "ID\tHC_01\tND_01\ng_at\tP\tA\n\nh_at\tA\tA\ng_at\tP\tP\n"

    with pytest.raises(DataFormatError, match=r"duplicate probeset id: g_at \(line 5, column 1\)") as info:
        parse_call_table(text)
    assert (info.value.row, info.value.column) == (5, 1)


def test_parse_call_table_checks_companion_dimensions():
    companion = parse_expression_table("ID\tHC_01\tND_01\tPD_01\na\t1\t1\t1\nb\t1\t1\t1\nc\t1\t1\t1\n")
    text = "ID\tHC_01\tND_01\na\tP\tP\nb\tP\tA\nc\tA\tA\n"

    with pytest.raises(DataValidationError, match="3x2"):
        parse_call_table(text, companion=companion)


@pytest.mark.parametrize(("sample_id", "label"), [("HC_01_log_z", "HC"), ("PD_50", "PD"), ("ND_7", "ND")])
def test_infer_labels_from_prefix(sample_id, label):
    labels, class_set = infer_labels([sample_id])

    assert labels == [label]
    assert class_set == [label]


def test_infer_labels_lists_every_offender():
    with pytest.raises(DataValidationError) as info:
        infer_labels(["HC_01", "SAMPLE_1", "XX_2"])
    assert "SAMPLE_1" in str(info.value)
    assert "XX_2" in str(info.value)


def test_infer_labels_class_set_in_first_appearance_order():
    _, class_set = infer_labels(["PD_01", "HC_01", "PD_02", "ND_01"])

    assert class_set == ["PD", "HC", "ND"]


def test_infer_labels_without_prefix_list():
    labels, _ = infer_labels(["tumor_1", "normal_2"], prefixes=None)

    assert labels == ["tumor", "normal"]


def test_label_table_overrides_prefixes():
    matrix = parse_expression_table("ID\ts1\ts2\ts3\ng\t1\t2\t3\n")
    mapping = parse_label_table("sample\tlabel\ns1\tcase\ns2\tcontrol\ns3\tcase\n")
    dataset = label_dataset(matrix, mapping)

    assert dataset.labels == ["case", "control", "case"]
    assert dataset.class_set == ["case", "control"]


def test_label_dataset_rejects_unlabeled_sample():
    matrix = parse_expression_table("ID\ts1\ts2\ng\t1\t2\n")

    with pytest.raises(DataValidationError, match="s2"):
        label_dataset(matrix, {"s1": "case"})


def test_write_table_matrix_is_lossless(tmp_path):
    rng = np.random.default_rng(5)
    values = rng.lognormal(5.0, 2.0, size=(5, 4))
    values[0, 0] = 1 / 3
    matrix = ExpressionMatrix(
        probeset_ids=[f"p{i}_at" for i in range(5)], sample_ids=["HC_01", "HC_02", "PD_01", "PD_02"], values=values
    )

    path = write_table(matrix, tmp_path / "nested" / "matrix.tsv")
    parsed = parse_expression_table(read_text(path))

    assert parsed.probeset_ids == matrix.probeset_ids
    assert parsed.sample_ids == matrix.sample_ids
    assert np.array_equal(parsed.values, matrix.values)


def test_write_table_scores_schema():
    score = GeneScore(
        probeset_id="200028_at",
        statistic=12.5,
        raw_p=0.001,
        fdr_bh=0.01,
        fwer_bonferroni=0.05,
        fwer_hochberg=0.04,
        rank=1,
    )

    lines = render_table([score]).splitlines()

    assert lines[0].split("\t") == ["probeset", "statistic", "raw_p", "fdr", "bonferroni", "hochberg", "rank"]
    assert lines[1].split("\t")[0] == "200028_at"
    assert lines[1].split("\t")[-1] == "1"


def test_write_table_empty_scores_needs_kind():
    assert render_table([], kind="scores").startswith("probeset\tstatistic")
    with pytest.raises(DataValidationError):
        render_table([])


def test_write_table_eval_report(separable_dataset):
    plan = stratified_folds(separable_dataset.labels, k=5, seed=0)
    report = nested_cv(separable_dataset, None, ClassifierConfig(kind="naive_bayes"), plan)

    text = render_table(report)

    assert "Kappa statistic" in text
    assert "Mean absolute error" in text
    assert "=== Confusion Matrix ===" in text
    assert "a\tb\tc\t<-- classified as" in text


def test_read_text_missing_file(tmp_path):
    with pytest.raises(DataValidationError, match="cannot read"):
        read_text(tmp_path / "missing.tsv")
