"""Class labels.

Labels come from sample ID prefixes (HC_01, ND_07, PD_50 ...) or from an explicit
two-column label table.
"""

from typing import Sequence

from app.exception import DataFormatError, DataValidationError
from app.types import DEFAULT_CLASS_PREFIXES, ExpressionMatrix, LabeledDataset


def infer_labels(
    sample_ids: Sequence[str], prefixes: Sequence[str] | None = DEFAULT_CLASS_PREFIXES
) -> tuple[list[str], list[str]]:
    """Infer each sample's class from its ID prefix.

    Args:
        sample_ids (Sequence[str]): The sample IDs, e.g. "HC_01_log_z".
        prefixes (Sequence[str] | None): The known class prefixes. With None, any text before the
            first "_" is taken as the class.

    Returns:
        tuple[list[str], list[str]]: The label of each sample and the class set in first-appearance order.

    Raises:
        DataValidationError: Listing every sample ID without a known prefix.
    """
    labels: list[str] = []
    offending: list[str] = []
    for sample_id in sample_ids:
        head, separator, _ = sample_id.partition("_")
        if not separator or not head or (prefixes is not None and head not in prefixes):
            offending.append(sample_id)
            continue
        labels.append(head)

    if offending:
        known = ", ".join(prefixes) if prefixes is not None else "any"
        raise DataValidationError(f"sample ids without a class prefix ({known}): {', '.join(offending)}")
    return labels, list(dict.fromkeys(labels))


def parse_label_table(text: str) -> dict[str, str]:
    """Parse a `sample<TAB>label` table; a header row starting with "sample" is skipped.

    Args:
        text (str): The tab-separated content.

    Returns:
        dict[str, str]: The label of each sample.

    Raises:
        DataFormatError: On malformed or duplicated rows.
    """
    mapping: dict[str, str] = {}
    for number, line in enumerate(text.lstrip("\ufeff").splitlines(), start=1):
        if not line.strip():
            continue
        cells = [cell.strip() for cell in line.split("\t")]
        if len(cells) != 2 or not all(cells):  # noqa: PLR2004
            raise DataFormatError("label rows need exactly two non-empty fields", row=number)
        if number == 1 and cells[0].lower() == "sample":
            continue
        if cells[0] in mapping:
            raise DataFormatError(f"duplicate sample id: {cells[0]}", row=number, column=1)
        mapping[cells[0]] = cells[1]
    return mapping


def label_dataset(
    matrix: ExpressionMatrix,
    label_map: dict[str, str] | None = None,
    prefixes: Sequence[str] | None = DEFAULT_CLASS_PREFIXES,
) -> LabeledDataset:
    """Attach class labels to a matrix.

    Args:
        matrix (ExpressionMatrix): The matrix.
        label_map (dict[str, str] | None): Explicit labels; when None they are inferred from the IDs.
        prefixes (Sequence[str] | None): The known prefixes for inference.

    Returns:
        LabeledDataset: The labeled dataset.

    Raises:
        DataValidationError: If a sample has no label.
    """
    if label_map is None:
        labels, class_set = infer_labels(matrix.sample_ids, prefixes)
        return LabeledDataset(matrix=matrix, labels=labels, class_set=class_set)

    missing = [sample_id for sample_id in matrix.sample_ids if sample_id not in label_map]
    if missing:
        raise DataValidationError(f"samples without a label: {', '.join(missing)}")
    return LabeledDataset.from_labels(matrix, [label_map[sample_id] for sample_id in matrix.sample_ids])
