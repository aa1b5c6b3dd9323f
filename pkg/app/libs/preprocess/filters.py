"""Probeset filters.

Reliability filtering by detection calls and removal of probesets that never rise
above the noise floor. Filters only drop rows; surviving values are untouched.
"""

import numpy as np
from loguru import logger

from app.exception import DataValidationError, InvalidParameterError
from app.types import CallMatrix, DetectionCall, ExpressionMatrix, FilterReport

DEFAULT_PRESENT_FRACTION = 0.25
DEFAULT_NOISE_FLOOR = 100.0


def _require_raw(matrix: ExpressionMatrix, operation: str):
    if matrix.stage != "raw":
        raise DataValidationError(f"{operation} needs raw values, matrix stage is {matrix.stage!r}")


def surrogate_calls(matrix: ExpressionMatrix, floor: float = DEFAULT_NOISE_FLOOR) -> CallMatrix:
    """Derive detection calls from the values when MAS5 calls are unavailable.

    Args:
        matrix (ExpressionMatrix): The raw matrix.
        floor (float): A cell is Present iff its value is at least this.

    Returns:
        CallMatrix: Present/Absent calls, never Marginal.
    """
    _require_raw(matrix, "surrogate_calls")
    calls = np.where(matrix.values >= floor, DetectionCall.PRESENT.value, DetectionCall.ABSENT.value)
    return CallMatrix(probeset_ids=matrix.probeset_ids, sample_ids=matrix.sample_ids, calls=calls)


def filter_by_present_calls(
    matrix: ExpressionMatrix, calls: CallMatrix, fraction: float = DEFAULT_PRESENT_FRACTION
) -> tuple[ExpressionMatrix, FilterReport]:
    """Keep probesets called Present in at least `fraction` of the samples.

    Marginal calls count as not Present.

    Args:
        matrix (ExpressionMatrix): The matrix to filter.
        calls (CallMatrix): The aligned detection calls.
        fraction (float): The minimum Present fraction, in (0, 1].

    Returns:
        tuple[ExpressionMatrix, FilterReport]: The kept rows and the report of this filter.

    Raises:
        InvalidParameterError: If the fraction is out of range.
    """
    if not 0 < fraction <= 1:
        raise InvalidParameterError(f"present fraction must be in (0, 1], got {fraction}")
    calls.check_aligned(matrix)

    present = calls.present_mask().sum(axis=1)
    # tolerance absorbs rounding of fraction * n (e.g. 0.1 * 30 > 3.0)
    keep = present >= fraction * matrix.n_samples - 1e-9 * matrix.n_samples
    kept = np.flatnonzero(keep)
    removed = [matrix.probeset_ids[i] for i in np.flatnonzero(~keep)]
    logger.info(f"Present-call filter ({fraction:.0%}): removed {len(removed)} of {matrix.n_probesets} probesets")
    report = FilterReport(
        input_count=matrix.n_probesets,
        removed_by_calls=len(removed),
        output_count=len(kept),
        removed_ids=removed,
    )
    return matrix.take_rows(kept), report


def filter_noise_floor(
    matrix: ExpressionMatrix, floor: float = DEFAULT_NOISE_FLOOR
) -> tuple[ExpressionMatrix, FilterReport]:
    """Remove probesets whose maximum value is below the noise floor.

    Args:
        matrix (ExpressionMatrix): The raw matrix.
        floor (float): Rows with every value strictly below this are removed.

    Returns:
        tuple[ExpressionMatrix, FilterReport]: The kept rows and the report of this filter.
    """
    _require_raw(matrix, "filter_noise_floor")
    if matrix.n_samples == 0:
        keep = np.zeros(matrix.n_probesets, dtype=bool)
    else:
        keep = matrix.values.max(axis=1) >= floor
    kept = np.flatnonzero(keep)
    removed = [matrix.probeset_ids[i] for i in np.flatnonzero(~keep)]
    logger.info(f"Noise-floor filter (<{floor:g}): removed {len(removed)} of {matrix.n_probesets} probesets")
    report = FilterReport(
        input_count=matrix.n_probesets,
        removed_by_noise=len(removed),
        output_count=len(kept),
        removed_ids=removed,
    )
    return matrix.take_rows(kept), report
