"""Correlation-based feature subset evaluation."""

from typing import Sequence

import numpy as np

from app.exception import DataValidationError
from app.types import LabeledDataset

# correlations this close to 1 are treated as exactly 1
UNIT_SNAP = 1e-12


def snap_unit(r: np.ndarray) -> np.ndarray:
    """Clip absolute correlations to [0, 1], snapping values within 1e-12 of 1 to exactly 1.

    Args:
        r (np.ndarray): Correlations or correlation ratios.

    Returns:
        np.ndarray: The clipped magnitudes.
    """
    r = np.minimum(np.abs(r), 1.0)
    return np.where(r > 1.0 - UNIT_SNAP, 1.0, r)


def correlation_ratio(X: np.ndarray, codes: np.ndarray, n_classes: int) -> np.ndarray:
    """The correlation ratio (eta) of each column of X with the class.

    eta = sqrt(between-class sum of squares / total sum of squares); 0 for constant columns.
    """
    X = np.asarray(X, dtype=float)
    total = ((X - X.mean(axis=0)) ** 2).sum(axis=0)
    between = np.zeros(X.shape[1])
    grand = X.mean(axis=0)
    for c in range(n_classes):
        members = X[codes == c]
        if members.shape[0]:
            between += members.shape[0] * (members.mean(axis=0) - grand) ** 2
    constant = X.std(axis=0) <= 1e-12 * np.maximum(np.abs(X).max(axis=0, initial=0.0), 1.0)
    eta = np.sqrt(np.clip(between / np.where(constant, 1.0, total), 0.0, 1.0))
    return np.where(constant, 0.0, snap_unit(eta))


def standardized_columns(X: np.ndarray) -> np.ndarray:
    """Center and scale each column to unit sample std; constant columns become 0."""
    X = np.asarray(X, dtype=float)
    centered = X - X.mean(axis=0)
    std = centered.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(X.shape[1])
    constant = std <= 1e-12 * np.maximum(np.abs(X).max(axis=0, initial=0.0), 1.0)
    return np.where(constant, 0.0, centered / np.where(constant, 1.0, std))


def merit_from_sums(k: np.ndarray | int, sum_cf: np.ndarray | float, sum_ff: np.ndarray | float) -> np.ndarray:
    """k r_cf / sqrt(k + k(k-1) r_ff) written with sums: sum_cf / sqrt(k + 2 sum_ff)."""
    return np.asarray(sum_cf) / np.sqrt(np.asarray(k) + 2.0 * np.asarray(sum_ff))


def cfs_merit(subset: Sequence[str], dataset: LabeledDataset) -> float:
    """The CFS merit of a feature subset.

    merit = k r_cf / sqrt(k + k(k-1) r_ff), with r_cf the mean correlation ratio of the
    features with the class and r_ff the mean absolute Pearson correlation over feature pairs.
    A constant feature contributes 0 to both.

    Args:
        subset (Sequence[str]): The probeset IDs; nonempty.
        dataset (LabeledDataset): The training data.

    Returns:
        float: The merit.
    """
    if not subset:
        raise DataValidationError("cfs_merit needs a nonempty subset")
    X = dataset.features(list(subset))
    k = X.shape[1]
    r_cf = correlation_ratio(X, dataset.class_codes, len(dataset.class_set))
    if k == 1:
        return float(r_cf[0])
    Z = standardized_columns(X)
    r_ff = snap_unit(Z.T @ Z / (X.shape[0] - 1))
    mean_ff = (r_ff.sum() - np.trace(r_ff)) / (k * (k - 1))
    return float(k * r_cf.mean() / np.sqrt(k + k * (k - 1) * mean_ff))
