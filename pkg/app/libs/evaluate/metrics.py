"""Confusion matrix, agreement and probability-error metrics."""

from typing import Sequence

import numpy as np

from app.exception import DataValidationError, DegenerateStatisticError
from app.types import ConfusionMatrix
from app.utils import one_hot

# distributions must sum to 1 within this
DISTRIBUTION_TOLERANCE = 1e-9


def confusion(predictions: Sequence[str], truths: Sequence[str], class_set: Sequence[str]) -> ConfusionMatrix:
    """Count true (row) versus predicted (column) classes.

    Raises:
        DataValidationError: On unequal lengths or a label outside the class set.
    """
    if len(predictions) != len(truths):
        raise DataValidationError(f"{len(predictions)} predictions but {len(truths)} truths")
    index = {label: i for i, label in enumerate(class_set)}
    unknown = sorted({label for label in [*predictions, *truths] if label not in index})
    if unknown:
        raise DataValidationError(f"labels not in class set: {', '.join(unknown)}")
    counts = np.zeros((len(class_set), len(class_set)), dtype=int)
    for predicted, truth in zip(predictions, truths, strict=True):
        counts[index[truth], index[predicted]] += 1
    return ConfusionMatrix(class_set=list(class_set), counts=counts.tolist())


def accuracy(cm: ConfusionMatrix) -> float:
    """trace / n; 0 for an empty matrix."""
    n = cm.n_instances
    return float(np.trace(cm.array) / n) if n else 0.0


def kappa(cm: ConfusionMatrix) -> float:
    """Cohen's kappa (p_o - p_e) / (1 - p_e) of a confusion matrix.

    Raises:
        DegenerateStatisticError: When the matrix is empty or chance agreement p_e is 1.
    """
    counts = cm.array.astype(float)
    n = counts.sum()
    if n == 0:
        raise DegenerateStatisticError("kappa is undefined without instances")
    p_o = np.trace(counts) / n
    p_e = float((counts.sum(axis=1) * counts.sum(axis=0)).sum() / n**2)
    if np.isclose(p_e, 1.0, rtol=0.0, atol=1e-15):
        raise DegenerateStatisticError("kappa is undefined when chance agreement is 1")
    return float((p_o - p_e) / (1.0 - p_e))


def _distributions(values: np.ndarray, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:  # noqa: PLR2004
        raise DataValidationError(f"{name} must be an instances x classes matrix")
    if np.any(~np.isfinite(values)) or np.any(values < 0):
        raise DataValidationError(f"{name} must be nonnegative")
    if np.any(np.abs(values.sum(axis=1) - 1.0) > DISTRIBUTION_TOLERANCE):
        raise DataValidationError(f"every row of {name} must sum to 1")
    return values


def prob_errors(
    probabilities: np.ndarray,
    truths: Sequence[str],
    class_set: Sequence[str],
    priors: np.ndarray | Sequence[float],
) -> tuple[float, float, float, float]:
    """Probability errors against one-hot truths, relative to a prior predictor.

    mae = mean |p - y| and rmse = sqrt(mean (p - y)^2) over instances and classes;
    rae and rrse divide by the same errors of the prior predictor, in percent.

    Args:
        probabilities (np.ndarray): The predicted distributions, shape (n, classes).
        truths (Sequence[str]): The true labels.
        class_set (Sequence[str]): The class order of the columns.
        priors (np.ndarray | Sequence[float]): The baseline distribution, either one vector
            or one row per instance (the training-fold prior of each held-out instance).

    Returns:
        tuple[float, float, float, float]: mae, rmse, rae (%), rrse (%).

    Raises:
        DataValidationError: When an input is not a distribution or lengths disagree.
        DegenerateStatisticError: When the prior predictor is already perfect.
    """
    p = _distributions(probabilities, "probabilities")
    index = {label: i for i, label in enumerate(class_set)}
    if p.shape != (len(truths), len(class_set)):
        raise DataValidationError(f"probabilities have shape {p.shape}, expected ({len(truths)}, {len(class_set)})")
    unknown = sorted({label for label in truths if label not in index})
    if unknown:
        raise DataValidationError(f"labels not in class set: {', '.join(unknown)}")
    baseline = _distributions(np.broadcast_to(np.asarray(priors, dtype=float), p.shape), "priors")
    y = one_hot(np.array([index[label] for label in truths], dtype=int), len(class_set))

    mae = float(np.abs(p - y).mean())
    rmse = float(np.sqrt(((p - y) ** 2).mean()))
    mae0 = float(np.abs(baseline - y).mean())
    rmse0 = float(np.sqrt(((baseline - y) ** 2).mean()))
    if mae0 == 0.0 or rmse0 == 0.0:
        raise DegenerateStatisticError("relative errors are undefined when the prior predictor is perfect")
    return mae, rmse, 100.0 * mae / mae0, 100.0 * rmse / rmse0
