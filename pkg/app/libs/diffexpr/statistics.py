"""Two-group and multi-group test statistics.

The scalar functions (`welch_t`, `snr`, `anova_f`) follow the textbook formulas and
raise on undefined inputs. `batch_statistics` computes the same statistics for every
probeset at once from per-class moments and is what the permutation test uses.
"""

from itertools import combinations
from typing import Sequence

import numpy as np

from app.exception import DegenerateStatisticError, InvalidParameterError
from app.types import StatisticKind
from app.utils import one_hot

# within-class sums of squares below this (rows standardized to unit variance) count as zero
ZERO_SPREAD = 1e-10


def _as_group(values: Sequence[float], name: str) -> np.ndarray:
    group = np.asarray(values, dtype=float)
    if group.ndim != 1 or group.size < 2:  # noqa: PLR2004
        raise InvalidParameterError(f"group {name} needs at least 2 values")
    return group


def welch_t(a: Sequence[float], b: Sequence[float]) -> float:
    """Welch's t statistic of group A against group B.

    Args:
        a (Sequence[float]): The values of group A, at least 2.
        b (Sequence[float]): The values of group B, at least 2.

    Returns:
        float: (mean_A - mean_B) / sqrt(var_A/n_A + var_B/n_B) with n-1 variances.

    Raises:
        DegenerateStatisticError: If both groups are constant with different means.
    """
    a, b = _as_group(a, "a"), _as_group(b, "b")
    diff = a.mean() - b.mean()
    se2 = a.var(ddof=1) / a.size + b.var(ddof=1) / b.size
    if se2 == 0:
        if diff == 0:
            return 0.0
        raise DegenerateStatisticError("both groups are constant with different means, t is infinite")
    return float(diff / np.sqrt(se2))


def snr(a: Sequence[float], b: Sequence[float]) -> float:
    """Signal-to-noise ratio of group A against group B.

    Args:
        a (Sequence[float]): The values of group A, at least 2.
        b (Sequence[float]): The values of group B, at least 2.

    Returns:
        float: (mean_A - mean_B) / (std_A + std_B) with n-1 standard deviations.

    Raises:
        DegenerateStatisticError: If both groups are constant.
    """
    a, b = _as_group(a, "a"), _as_group(b, "b")
    spread = a.std(ddof=1) + b.std(ddof=1)
    if spread == 0:
        raise DegenerateStatisticError("both groups are constant, SNR denominator is zero")
    return float((a.mean() - b.mean()) / spread)


def anova_f(groups: Sequence[Sequence[float]]) -> float:
    """One-way ANOVA F statistic.

    Args:
        groups (Sequence[Sequence[float]]): At least 2 groups of at least 2 values.

    Returns:
        float: Between-group mean square over within-group mean square.

    Raises:
        DegenerateStatisticError: If the within-group variance is zero.
    """
    if len(groups) < 2:  # noqa: PLR2004
        raise InvalidParameterError("ANOVA needs at least 2 groups")
    arrays = [_as_group(group, str(i)) for i, group in enumerate(groups)]
    total = sum(group.size for group in arrays)
    grand = np.concatenate(arrays).mean()
    between = sum(group.size * (group.mean() - grand) ** 2 for group in arrays)
    within = sum(((group - group.mean()) ** 2).sum() for group in arrays)
    if within == 0:
        raise DegenerateStatisticError("within-group variance is zero, F is undefined")
    return float((between / (len(arrays) - 1)) / (within / (total - len(arrays))))


def standardize_rows(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Center and scale each row; all supported statistics are invariant to this.

    Args:
        values (np.ndarray): The matrix, shape (genes, samples).

    Returns:
        tuple[np.ndarray, np.ndarray]: The standardized rows (constant rows become zeros) and a mask
        of the constant rows.
    """
    values = np.asarray(values, dtype=float)
    constant = np.ptp(values, axis=1) == 0 if values.shape[1] else np.ones(values.shape[0], dtype=bool)
    centered = values - values.mean(axis=1, keepdims=True)
    scale = np.sqrt((centered**2).mean(axis=1, keepdims=True))
    scale = np.where(constant[:, None] | (scale == 0), 1.0, scale)
    return np.where(constant[:, None], 0.0, centered / scale), constant


def class_moments(rows: np.ndarray, codes: np.ndarray, n_classes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-class sizes, means and within-class sums of squares for every row.

    Args:
        rows (np.ndarray): Standardized rows, shape (genes, samples).
        codes (np.ndarray): The class code of each sample.
        n_classes (int): The number of classes.

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: Sizes (classes,), means and sums of squares (genes, classes).
    """
    membership = one_hot(codes, n_classes)
    sizes = membership.sum(axis=0)
    means = (rows @ membership) / sizes
    squares = (rows**2) @ membership - sizes * means**2
    squares = np.where(squares <= ZERO_SPREAD * sizes, 0.0, squares)
    return sizes, means, squares


def _ratio(numerator: np.ndarray, denominator: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """numerator/denominator with 0/0 -> 0 and x/0 -> ±inf; also returns where the denominator is 0."""
    zero = denominator == 0
    safe = np.where(zero, 1.0, denominator)
    tied = np.abs(numerator) <= 1e-12
    value = np.where(zero, np.where(tied, 0.0, np.sign(numerator) * np.inf), numerator / safe)
    return value, zero


def batch_statistics(
    rows: np.ndarray, codes: np.ndarray, n_classes: int, kind: StatisticKind
) -> tuple[np.ndarray, np.ndarray]:
    """Compute a statistic for every row.

    With two classes t and SNR are signed (first class minus second); with more classes
    they are the maximum absolute pairwise value. F is the one-way ANOVA F.

    Args:
        rows (np.ndarray): Standardized rows, shape (genes, samples).
        codes (np.ndarray): The class code of each sample.
        n_classes (int): The number of classes.
        kind (StatisticKind): "t", "snr" or "f".

    Returns:
        tuple[np.ndarray, np.ndarray]: The statistics (±inf where a zero spread meets a mean difference)
        and a mask of rows where the scalar statistic would be undefined.
    """
    sizes, means, squares = class_moments(rows, codes, n_classes)
    if np.any(sizes < 2):  # noqa: PLR2004
        raise InvalidParameterError("every class needs at least 2 samples")

    if kind == "f":
        grand = (means * sizes).sum(axis=1) / sizes.sum()
        between = (sizes * (means - grand[:, None]) ** 2).sum(axis=1) / (n_classes - 1)
        within = squares.sum(axis=1) / (sizes.sum() - n_classes)
        return _ratio(between, within)

    variances = squares / (sizes - 1)
    pairs = list(combinations(range(n_classes), 2))
    stats = np.empty((rows.shape[0], len(pairs)))
    undefined = np.zeros(rows.shape[0], dtype=bool)
    for column, (a, b) in enumerate(pairs):
        diff = means[:, a] - means[:, b]
        if kind == "t":
            value, zero = _ratio(diff, np.sqrt(variances[:, a] / sizes[a] + variances[:, b] / sizes[b]))
            undefined |= zero & np.isinf(value)
        elif kind == "snr":
            value, zero = _ratio(diff, np.sqrt(variances[:, a]) + np.sqrt(variances[:, b]))
            undefined |= zero
        else:
            raise InvalidParameterError(f"unknown statistic {kind!r}")
        stats[:, column] = value

    if len(pairs) == 1:
        return stats[:, 0], undefined
    return np.abs(stats).max(axis=1), undefined
