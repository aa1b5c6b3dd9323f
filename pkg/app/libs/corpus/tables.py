"""Tab-separated tables.

This module parses expression and call tables and renders every toolkit result
(matrices, scores, reports, subsets) as tab-separated text.
"""

import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from loguru import logger

from app.exception import DataFormatError, DataValidationError
from app.types import (
    CallMatrix,
    DetectionCall,
    EvalReport,
    ExpressionMatrix,
    FeatureRanking,
    FeatureSubset,
    FilterReport,
    GeneScore,
    LabeledDataset,
    OutlierRecord,
    Stage,
    TransformSummary,
)
from app.utils import find_duplicates

SCORE_COLUMNS = ["probeset", "statistic", "raw_p", "fdr", "bonferroni", "hochberg", "rank"]
OUTLIER_COLUMNS = ["probeset", "sample", "class", "observed", "class_mean", "class_std", "z"]
SUMMARY_COLUMNS = ["sample", "scale", "lower", "upper", "count", "skewness"]

TableKind = Literal["scores", "outliers"]


def _split_table(text: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Split a table into its header and its numbered data rows.

    Args:
        text (str): The table content, LF or CRLF line endings.

    Returns:
        tuple[list[str], list[tuple[int, list[str]]]]: The header cells and (line number, cells) per data row.
    """
    lines = text.lstrip("\ufeff").splitlines()
    numbered = [(number, line) for number, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise DataFormatError("table is empty")

    header_number, header_line = numbered[0]
    header = header_line.split("\t")
    if len(header) < 2:  # noqa: PLR2004
        raise DataFormatError("header needs an identifier column and at least one sample", row=header_number)

    rows = []
    for number, line in numbered[1:]:
        cells = line.split("\t")
        if len(cells) != len(header):
            raise DataFormatError(f"ragged row: expected {len(header)} fields, found {len(cells)}", row=number)
        rows.append((number, cells))
    return header, rows


def _check_unique(ids: list[str], what: str, row: int | None = None):
    if duplicates := find_duplicates(ids):
        raise DataFormatError(f"duplicate {what} id: {duplicates[0]}", row=row)


def parse_expression_table(text: str, stage: Stage = "raw") -> ExpressionMatrix:
    """Parse an expression table.

    The first row holds the sample IDs (its first cell is ignored), the first column
    the probeset IDs. Row and column order are preserved.

    Args:
        text (str): The tab-separated content.
        stage (Stage): The transforms already applied. Negative cells are only allowed after `raw`.

    Returns:
        ExpressionMatrix: The matrix.

    Raises:
        DataFormatError: On duplicate IDs, ragged rows, non-numeric or non-finite cells, and negative raw cells.
    """
    header, rows = _split_table(text)
    sample_ids = [cell.strip() for cell in header[1:]]
    _check_unique(sample_ids, "sample", row=1)

    probeset_ids: list[str] = []
    seen: set[str] = set()
    values = np.empty((len(rows), len(sample_ids)))
    for i, (number, cells) in enumerate(rows):
        probeset_id = cells[0].strip()
        if probeset_id in seen:
            raise DataFormatError(f"duplicate probeset id: {probeset_id}", row=number, column=1)
        seen.add(probeset_id)
        probeset_ids.append(probeset_id)
        for j, cell in enumerate(cells[1:]):
            try:
                value = float(cell)
            except ValueError:
                raise DataFormatError(f"non-numeric value {cell!r}", row=number, column=j + 2) from None
            if not math.isfinite(value):
                raise DataFormatError(f"non-finite value {cell!r}", row=number, column=j + 2)
            if value < 0 and stage == "raw":
                raise DataFormatError(f"negative value {cell!r}", row=number, column=j + 2)
            values[i, j] = value

    logger.debug(f"Parsed expression table: {len(probeset_ids)} probesets x {len(sample_ids)} samples")
    return ExpressionMatrix(probeset_ids=probeset_ids, sample_ids=sample_ids, values=values, stage=stage)


def parse_call_table(text: str, companion: ExpressionMatrix | None = None) -> CallMatrix:
    """Parse a detection-call table with P/M/A cells.

    Args:
        text (str): The tab-separated content, same layout as an expression table.
        companion (ExpressionMatrix | None): The matrix the calls must align with.

    Returns:
        CallMatrix: The calls.

    Raises:
        DataFormatError: On unknown symbols, duplicate IDs or ragged rows.
        DataValidationError: On a dimension or identifier mismatch with the companion.
    """
    header, rows = _split_table(text)
    sample_ids = [cell.strip() for cell in header[1:]]
    _check_unique(sample_ids, "sample", row=1)

    symbols = {call.value for call in DetectionCall}
    probeset_ids: list[str] = []
    seen: set[str] = set()
    calls = np.empty((len(rows), len(sample_ids)), dtype="<U1")
    for i, (number, cells) in enumerate(rows):
        probeset_id = cells[0].strip()
        if probeset_id in seen:
            raise DataFormatError(f"duplicate probeset id: {probeset_id}", row=number, column=1)
        seen.add(probeset_id)
        probeset_ids.append(probeset_id)
        for j, cell in enumerate(cells[1:]):
            symbol = cell.strip().upper()
            if symbol not in symbols:
                raise DataFormatError(f"unknown call symbol {cell!r}", row=number, column=j + 2)
            calls[i, j] = symbol

    matrix = CallMatrix(probeset_ids=probeset_ids, sample_ids=sample_ids, calls=calls)
    if companion is not None:
        matrix.check_aligned(companion)
    return matrix


def _fmt(value: float) -> str:
    return repr(float(value))


def _render_matrix(probeset_ids: list[str], sample_ids: list[str], cells: Any, corner: str = "probeset") -> str:
    lines = ["\t".join([corner, *sample_ids])]
    for probeset_id, row in zip(probeset_ids, cells, strict=True):
        lines.append("\t".join([probeset_id, *row]))
    return "\n".join(lines) + "\n"


def _render_scores(scores: list[GeneScore]) -> str:
    lines = ["\t".join(SCORE_COLUMNS)]
    for score in scores:
        lines.append(
            "\t".join(
                [
                    score.probeset_id,
                    _fmt(score.statistic),
                    _fmt(score.raw_p),
                    _fmt(score.fdr_bh),
                    _fmt(score.fwer_bonferroni),
                    _fmt(score.fwer_hochberg),
                    str(score.rank),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _render_outliers(records: list[OutlierRecord]) -> str:
    lines = ["\t".join(OUTLIER_COLUMNS)]
    for record in records:
        lines.append(
            "\t".join(
                [
                    record.probeset_id,
                    record.sample_id,
                    record.class_label,
                    _fmt(record.observed_value),
                    _fmt(record.class_mean),
                    _fmt(record.class_std),
                    _fmt(record.z),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _render_transform_summary(summary: TransformSummary) -> str:
    skewness = {"raw": summary.raw_skewness, "log": summary.log_skewness}
    lines = ["\t".join(SUMMARY_COLUMNS)]
    for bar in summary.bins:
        bounds = [_fmt(bar.lower), _fmt(bar.upper)]
        cells = [summary.sample_id, bar.scale, *bounds, str(bar.count), _fmt(skewness[bar.scale])]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _render_filter_report(report: FilterReport) -> str:
    lines = [
        "metric\tvalue",
        f"input_count\t{report.input_count}",
        f"removed_by_calls\t{report.removed_by_calls}",
        f"removed_by_noise\t{report.removed_by_noise}",
        f"output_count\t{report.output_count}",
    ]
    lines += [f"removed\t{probeset_id}" for probeset_id in report.removed_ids]
    return "\n".join(lines) + "\n"


def _render_subset(subset: FeatureSubset) -> str:
    lines = ["feature_id\trank\tscore"]
    scores = {step.feature_id: step.score for step in subset.trace}
    for rank, feature_id in enumerate(subset.feature_ids, start=1):
        lines.append(f"{feature_id}\t{rank}\t{_fmt(scores.get(feature_id, subset.score))}")
    return "\n".join(lines) + "\n"


def _render_ranking(ranking: FeatureRanking) -> str:
    lines = ["feature_id\trank\tcriterion"]
    for rank, (feature_id, criterion) in enumerate(zip(ranking.feature_ids, ranking.criteria, strict=True), start=1):
        lines.append(f"{feature_id}\t{rank}\t{_fmt(criterion)}")
    return "\n".join(lines) + "\n"


def render_table(obj: Any, kind: TableKind | None = None) -> str:
    """Render a toolkit result as tab-separated text.

    Matrices use `repr` floats, which parse back to the identical double.

    Args:
        obj (Any): A matrix, dataset, call matrix, score list, outlier list, filter report,
            transform summary, feature subset, feature ranking or evaluation report.
        kind (TableKind | None): The schema of an empty list. Defaults to inferring it from the elements.

    Returns:
        str: The table.

    Raises:
        DataValidationError: If the object has no table form.
    """
    if isinstance(obj, LabeledDataset):
        obj = obj.matrix
    if isinstance(obj, ExpressionMatrix):
        rows = ([_fmt(value) for value in row] for row in obj.values)
        return _render_matrix(obj.probeset_ids, obj.sample_ids, rows)
    if isinstance(obj, CallMatrix):
        return _render_matrix(obj.probeset_ids, obj.sample_ids, (list(row) for row in obj.calls))
    if isinstance(obj, EvalReport):
        return obj.to_text()
    if isinstance(obj, FilterReport):
        return _render_filter_report(obj)
    if isinstance(obj, TransformSummary):
        return _render_transform_summary(obj)
    if isinstance(obj, FeatureSubset):
        return _render_subset(obj)
    if isinstance(obj, FeatureRanking):
        return _render_ranking(obj)
    if isinstance(obj, list):
        if (obj and isinstance(obj[0], GeneScore)) or (not obj and kind == "scores"):
            return _render_scores(obj)
        if (obj and isinstance(obj[0], OutlierRecord)) or (not obj and kind == "outliers"):
            return _render_outliers(obj)
    raise DataValidationError(f"no table form for {type(obj).__name__}")


def write_table(obj: Any, destination: Path | str, kind: TableKind | None = None) -> Path:
    """Write a toolkit result to a UTF-8 tab-separated file.

    Args:
        obj (Any): Anything `render_table` accepts.
        destination (Path | str): The file to write.
        kind (TableKind | None): The schema of an empty list.

    Returns:
        Path: The written file.

    Raises:
        DataValidationError: If the file cannot be written.
    """
    path = Path(destination)
    content = render_table(obj, kind=kind)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8", newline="\n")
    except OSError as e:
        raise DataValidationError(f"cannot write {path}: {e}") from e
    logger.debug(f"Wrote {path}")
    return path


def read_text(source: Path | str) -> str:
    """Read a UTF-8 input file.

    Args:
        source (Path | str): The file to read.

    Returns:
        str: The content.

    Raises:
        DataValidationError: If the file cannot be read.
    """
    try:
        return Path(source).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DataValidationError(f"cannot read {source}: {e}") from e
