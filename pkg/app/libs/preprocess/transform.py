"""Value transforms: logarithm and per-probeset z-score, plus the before-and-after summary of the log."""

import numpy as np
from loguru import logger
from scipy import stats

from app.exception import DataValidationError, InvalidParameterError
from app.types import DistributionBin, ExpressionMatrix, TransformSummary

DEFAULT_LOG_BASE = 2.0
DEFAULT_LOG_EPSILON = 1.0
DEFAULT_SUMMARY_BINS = 30


def log_transform(
    matrix: ExpressionMatrix, base: float = DEFAULT_LOG_BASE, epsilon: float = DEFAULT_LOG_EPSILON
) -> ExpressionMatrix:
    """Take the logarithm of every cell after clamping it at `epsilon`.

    Args:
        matrix (ExpressionMatrix): The raw matrix.
        base (float): The logarithm base.
        epsilon (float): Values below this are raised to it first; 1.0 maps them to 0.

    Returns:
        ExpressionMatrix: The transformed matrix, stage `log`.

    Raises:
        DataValidationError: If the matrix is not raw.
        InvalidParameterError: On an invalid base or epsilon.
    """
    if matrix.stage != "raw":
        raise DataValidationError(f"log_transform needs raw values, matrix stage is {matrix.stage!r}")
    if base <= 0 or base == 1:
        raise InvalidParameterError(f"log base must be positive and not 1, got {base}")
    if epsilon <= 0:
        raise InvalidParameterError(f"log epsilon must be positive, got {epsilon}")

    clamped = np.maximum(matrix.values, epsilon)
    # exact powers stay exact in the common bases
    if base == 2:  # noqa: PLR2004
        values = np.log2(clamped)
    elif base == 10:  # noqa: PLR2004
        values = np.log10(clamped)
    else:
        values = np.log(clamped) / np.log(base)
    return matrix.with_values(values, stage="log")


def zscore(matrix: ExpressionMatrix) -> tuple[ExpressionMatrix, list[str]]:
    """Standardize each probeset by its mean and sample standard deviation.

    Args:
        matrix (ExpressionMatrix): The matrix, normally at stage `log`.

    Returns:
        tuple[ExpressionMatrix, list[str]]: The standardized matrix (stage `zscore`) and the probesets
        with zero variance, whose rows are set to zeros.
    """
    values = np.asarray(matrix.values)
    if matrix.n_samples < 2:  # noqa: PLR2004
        return matrix.with_values(np.zeros_like(values), stage="zscore"), list(matrix.probeset_ids)

    centered = values - values.mean(axis=1, keepdims=True)
    std = centered.std(axis=1, ddof=1, keepdims=True)
    degenerate = std[:, 0] <= 1e-12 * np.maximum(1.0, np.abs(values).max(axis=1))
    safe = np.where(degenerate[:, None], 1.0, std)
    standardized = np.where(degenerate[:, None], 0.0, centered / safe)

    flagged = [matrix.probeset_ids[i] for i in np.flatnonzero(degenerate)]
    if flagged:
        logger.warning(f"{len(flagged)} probesets have zero variance and were set to zero")
    return matrix.with_values(standardized, stage="zscore"), flagged


def _skewness(values: np.ndarray) -> float:
    if values.size < 3 or np.ptp(values) == 0:  # noqa: PLR2004
        return 0.0
    return float(stats.skew(values))


def transform_summary(
    raw: ExpressionMatrix, logged: ExpressionMatrix, sample_id: str | None = None, bins: int = DEFAULT_SUMMARY_BINS
) -> TransformSummary:
    """Summarize one sample before and after the log transform.

    Each scale gets `bins` equal-width bars spanning that sample's range, so the table
    can be drawn as two histograms side by side.

    Args:
        raw (ExpressionMatrix): The raw matrix fed to `log_transform`.
        logged (ExpressionMatrix): Its log-transformed counterpart.
        sample_id (str | None): The sample to summarize. Defaults to the first one.
        bins (int): The number of bars per scale.

    Returns:
        TransformSummary: The skewness of both scales and the histogram bars.

    Raises:
        DataValidationError: If the matrices are not a raw and log pair of the same shape.
        InvalidParameterError: On an unknown sample or fewer than one bin.
    """
    if raw.stage != "raw" or logged.stage != "log":
        raise DataValidationError(f"transform summary needs raw and log matrices, got {raw.stage} and {logged.stage}")
    if raw.sample_ids != logged.sample_ids or raw.probeset_ids != logged.probeset_ids:
        raise DataValidationError("raw and log matrices do not align")
    if bins < 1:
        raise InvalidParameterError(f"bins must be positive, got {bins}")
    sample_id = sample_id or raw.sample_ids[0]
    if sample_id not in raw.sample_ids:
        raise InvalidParameterError(f"unknown sample {sample_id!r}")

    column = raw.sample_ids.index(sample_id)
    columns = {"raw": np.asarray(raw.values)[:, column], "log": np.asarray(logged.values)[:, column]}
    histogram: list[DistributionBin] = []
    for scale, values in columns.items():
        counts, edges = np.histogram(values, bins=bins)
        histogram += [
            DistributionBin(scale=scale, lower=float(edges[i]), upper=float(edges[i + 1]), count=int(counts[i]))
            for i in range(bins)
        ]

    summary = TransformSummary(
        sample_id=sample_id,
        raw_skewness=_skewness(columns["raw"]),
        log_skewness=_skewness(columns["log"]),
        bins=histogram,
    )
    logger.info(
        f"Log transform of {sample_id}: skewness {summary.raw_skewness:.3f} -> {summary.log_skewness:.3f}"
    )
    return summary
