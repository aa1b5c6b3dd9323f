"""Within-class outlier detection and class-mean imputation.

A value is an outlier when it sits more than `threshold` standard deviations from the
other members of its class on the same probeset. The tested value is left out of the
class mean and standard deviation it is compared against.

Several outliers in one class can hide each other by inflating the spread they are
measured against. A masking pass therefore peels the most extreme value off each
class row in turn, re-testing the rest against what remains, and flags every value
peeled off before the last one that crossed the threshold.
"""

import math

import numpy as np
from loguru import logger

from app.exception import AlgorithmError, DataValidationError
from app.types import ExpressionMatrix, LabeledDataset, OutlierRecord

DEFAULT_Z_THRESHOLD = 5.0
MIN_CLASS_SIZE = 3
# share of a class the masking pass may peel off each probeset
MAX_MASKED_FRACTION = 0.1
# relative spread under which the other class members count as constant
CONSTANT_TOLERANCE = 1e-12


def _standardize(deviation: np.ndarray, std: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Divide deviations by their reference std.

    A zero std means the reference values are constant: a deviation from them is
    infinitely far (signed infinity), no deviation is a z of 0.

    Args:
        deviation (np.ndarray): Value minus reference mean.
        std (np.ndarray): The reference standard deviation, broadcastable to `deviation`.
        scale (np.ndarray): The magnitude the tolerance is relative to, broadcastable to `deviation`.

    Returns:
        np.ndarray: The z-scores.
    """
    deviation, std = np.broadcast_arrays(deviation, std)
    tiny = CONSTANT_TOLERANCE * scale
    spread = std > tiny
    z = np.divide(deviation, std, out=np.zeros(deviation.shape), where=spread)
    apart = ~spread & (np.abs(deviation) > tiny)
    z[apart] = np.copysign(np.inf, deviation[apart])
    return z


def _leave_one_out_stats(block: np.ndarray, active: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and sample std of the other active values of each row, for every active cell.

    Args:
        block (np.ndarray): The values of one class, shape (probesets, n).
        active (np.ndarray): The cells still taking part; every row has the same count, at least 3.

    Returns:
        tuple[np.ndarray, np.ndarray]: The leave-one-out means and stds, both shaped like `block`.
            Entries of inactive cells are meaningless.
    """
    m = active.sum(axis=1, keepdims=True)
    center = np.where(active, block, 0.0).sum(axis=1, keepdims=True) / m
    centered = np.where(active, block - center, 0.0)
    total = centered.sum(axis=1, keepdims=True)
    squares = (centered**2).sum(axis=1, keepdims=True)
    loo_mean = (total - centered) / (m - 1)
    loo_var = (squares - centered**2 - (m - 1) * loo_mean**2) / (m - 2)
    return loo_mean + center, np.sqrt(np.maximum(loo_var, 0.0))


def _flag_block(block: np.ndarray, threshold: float, scale: np.ndarray) -> np.ndarray:
    """Flag the outliers of one class.

    Args:
        block (np.ndarray): The values of one class, shape (probesets, n), n >= 3.
        threshold (float): The |z| cutoff.
        scale (np.ndarray): The per-row magnitude, shape (probesets, 1).

    Returns:
        np.ndarray: The boolean flag mask, shaped like `block`.
    """
    rows, n = block.shape
    active = np.ones(block.shape, dtype=bool)
    loo_mean, loo_std = _leave_one_out_stats(block, active)
    z = _standardize(block - loo_mean, loo_std, scale)
    flagged = np.abs(z) > threshold

    steps = min(n - 2, max(1, math.ceil(MAX_MASKED_FRACTION * n)))
    every_row = np.arange(rows)
    peeled = np.empty((rows, steps), dtype=int)
    crossed = np.zeros((rows, steps), dtype=bool)
    for step in range(steps):
        if step:
            loo_mean, loo_std = _leave_one_out_stats(block, active)
            z = _standardize(block - loo_mean, loo_std, scale)
        strength = np.where(active, np.abs(z), -1.0)
        pick = strength.argmax(axis=1)
        peeled[:, step] = pick
        crossed[:, step] = strength[every_row, pick] > threshold
        active[every_row, pick] = False

    depth = np.where(crossed.any(axis=1), steps - crossed[:, ::-1].argmax(axis=1), 0)
    for step in range(steps):
        reached = step < depth
        flagged[every_row[reached], peeled[reached, step]] = True
    return flagged


def detect_outliers(dataset: LabeledDataset, threshold: float = DEFAULT_Z_THRESHOLD) -> list[OutlierRecord]:
    """Flag values inconsistent with their own class.

    A value is flagged when its leave-one-out |z| exceeds `threshold`, or when the
    masking pass peels it off at or before the last class-mate that did. A value
    whose class-mates are all equal is flagged whenever it differs from them.
    Records carry the mean and std of the unflagged class-mates, the same values
    imputation averages.

    Args:
        dataset (LabeledDataset): The dataset, normally on the raw scale.
        threshold (float): Values with |z| above this are flagged.

    Returns:
        list[OutlierRecord]: The flagged cells, ordered by probeset row then sample column.

    Raises:
        DataValidationError: If a class has fewer than 3 samples.
    """
    counts = dataset.class_counts()
    small = [label for label, count in counts.items() if 0 < count < MIN_CLASS_SIZE]
    if small:
        raise DataValidationError(f"outlier detection needs >= {MIN_CLASS_SIZE} samples per class: {', '.join(small)}")

    values = np.asarray(dataset.matrix.values)
    codes = dataset.class_codes
    found: list[tuple[int, int, OutlierRecord]] = []
    for code, label in enumerate(dataset.class_set):
        columns = np.flatnonzero(codes == code)
        if columns.size == 0:
            continue
        block = values[:, columns]
        scale = np.maximum(1.0, np.abs(block).max(axis=1, keepdims=True))
        flagged = _flag_block(block, threshold, scale)
        if not flagged.any():
            continue

        loo_mean, loo_std = _leave_one_out_stats(block, np.ones(block.shape, dtype=bool))
        keep = ~flagged
        kept = keep.sum(axis=1, keepdims=True)
        kept_mean = np.where(keep, block, 0.0).sum(axis=1, keepdims=True) / np.maximum(kept, 1)
        kept_var = np.where(keep, (block - kept_mean) ** 2, 0.0).sum(axis=1, keepdims=True) / np.maximum(kept - 1, 1)
        # fewer than two unflagged class-mates: fall back to all of them
        enough = kept >= 2  # noqa: PLR2004
        mean = np.where(enough, kept_mean, loo_mean)
        std = np.where(enough, np.sqrt(kept_var), loo_std)
        z = _standardize(block - mean, std, scale)
        for row, position in zip(*np.nonzero(flagged), strict=True):
            column = int(columns[position])
            record = OutlierRecord(
                probeset_id=dataset.matrix.probeset_ids[row],
                sample_id=dataset.matrix.sample_ids[column],
                class_label=label,
                observed_value=float(block[row, position]),
                class_mean=float(mean[row, position]),
                class_std=float(std[row, position]),
                z=float(z[row, position]),
            )
            found.append((int(row), column, record))

    found.sort(key=lambda item: (item[0], item[1]))
    logger.info(f"Outlier detection (|z| > {threshold:g}): {len(found)} values flagged")
    return [record for _, _, record in found]


def impute_outliers(dataset: LabeledDataset, records: list[OutlierRecord]) -> ExpressionMatrix:
    """Replace each flagged value by the mean of the unflagged values of its class.

    Args:
        dataset (LabeledDataset): The dataset the records were detected on.
        records (list[OutlierRecord]): The flagged cells.

    Returns:
        ExpressionMatrix: The matrix with exactly the flagged cells replaced.

    Raises:
        DataValidationError: If a record does not belong to the dataset.
        AlgorithmError: If every value of a probeset within a class is flagged.
    """
    if not records:
        return dataset.matrix

    rows = {probeset_id: i for i, probeset_id in enumerate(dataset.matrix.probeset_ids)}
    columns = {sample_id: j for j, sample_id in enumerate(dataset.matrix.sample_ids)}
    codes = dataset.class_codes
    original = np.asarray(dataset.matrix.values)
    flagged = np.zeros(original.shape, dtype=bool)
    for record in records:
        if record.probeset_id not in rows or record.sample_id not in columns:
            raise DataValidationError(f"outlier {record.probeset_id}/{record.sample_id} is not in the dataset")
        flagged[rows[record.probeset_id], columns[record.sample_id]] = True

    imputed = original.copy()
    for row, column in zip(*np.nonzero(flagged), strict=True):
        members = codes == codes[column]
        keep = members & ~flagged[row]
        if not keep.any():
            label = dataset.labels[column]
            raise AlgorithmError(
                f"every {label} value of {dataset.matrix.probeset_ids[row]} is flagged, nothing to average"
            )
        imputed[row, column] = original[row, keep].mean()

    logger.info(f"Imputed {int(flagged.sum())} outlier values with class means")
    return dataset.matrix.with_values(imputed)
