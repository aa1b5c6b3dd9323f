"""The canonical preprocessing chain.

Call filter, noise filter, outlier detection and imputation on the raw scale, then
the log transform and the per-probeset z-score.
"""

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.libs.preprocess.filters import (
    DEFAULT_NOISE_FLOOR,
    DEFAULT_PRESENT_FRACTION,
    filter_by_present_calls,
    filter_noise_floor,
    surrogate_calls,
)
from app.libs.preprocess.outliers import DEFAULT_Z_THRESHOLD, detect_outliers, impute_outliers
from app.libs.preprocess.transform import (
    DEFAULT_LOG_BASE,
    DEFAULT_LOG_EPSILON,
    log_transform,
    transform_summary,
    zscore,
)
from app.types import CallMatrix, FilterReport, LabeledDataset, OutlierRecord, TransformSummary


class PreprocessOptions(BaseModel):
    """Thresholds of the preprocessing chain."""

    present_fraction: float = Field(default=DEFAULT_PRESENT_FRACTION, gt=0.0, le=1.0)
    """The minimum fraction of Present calls."""

    noise_floor: float = DEFAULT_NOISE_FLOOR
    """Probesets whose maximum is below this are removed."""

    surrogate_floor: float | None = None
    """The Present threshold of surrogate calls; defaults to the noise floor."""

    z_threshold: float = Field(default=DEFAULT_Z_THRESHOLD, gt=0.0)
    """The outlier threshold."""

    log_base: float = DEFAULT_LOG_BASE
    """The logarithm base."""

    log_epsilon: float = DEFAULT_LOG_EPSILON
    """The clamp applied before the logarithm."""

    impute: bool = True
    """Whether flagged outliers are replaced by class means."""


class PreprocessResult(BaseModel):
    """The output of the preprocessing chain."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    dataset: LabeledDataset
    """The filtered, imputed, log-transformed and standardized dataset."""

    filter_report: FilterReport
    """The filter bookkeeping."""

    outliers: list[OutlierRecord]
    """The flagged values, detected on the filtered raw data."""

    degenerate_ids: list[str]
    """The probesets whose z-score was undefined."""

    transform_summary: TransformSummary
    """The first sample of the first class before and after the log transform."""

    used_surrogate_calls: bool
    """Whether calls were derived from the values."""


def run_preprocessing(
    dataset: LabeledDataset, calls: CallMatrix | None = None, options: PreprocessOptions | None = None
) -> PreprocessResult:
    """Run the full preprocessing chain.

    Args:
        dataset (LabeledDataset): The raw labeled dataset.
        calls (CallMatrix | None): The detection calls; surrogate calls are used when missing.
        options (PreprocessOptions | None): The thresholds. Defaults to the documented defaults.

    Returns:
        PreprocessResult: The preprocessed dataset and the bookkeeping.
    """
    options = options or PreprocessOptions()
    matrix = dataset.matrix

    used_surrogate = calls is None
    if calls is None:
        floor = options.noise_floor if options.surrogate_floor is None else options.surrogate_floor
        logger.info(f"No detection calls supplied, deriving Present calls at value >= {floor:g}")
        calls = surrogate_calls(matrix, floor)

    matrix, call_report = filter_by_present_calls(matrix, calls, options.present_fraction)
    matrix, noise_report = filter_noise_floor(matrix, options.noise_floor)
    report = call_report.merge(noise_report)
    logger.info(f"Filtering kept {report.output_count} of {report.input_count} probesets")

    filtered = dataset.with_matrix(matrix)
    outliers = detect_outliers(filtered, options.z_threshold)
    if options.impute:
        matrix = impute_outliers(filtered, outliers)

    logged = log_transform(matrix, options.log_base, options.log_epsilon)
    # first sample of the earliest class, a control in the usual HC/ND/PD layout
    reference = dataset.matrix.sample_ids[int(np.argmin(dataset.class_codes))]
    summary = transform_summary(matrix, logged, sample_id=reference)
    matrix, degenerate = zscore(logged)
    return PreprocessResult(
        dataset=dataset.with_matrix(matrix),
        filter_report=report,
        outliers=outliers,
        degenerate_ids=degenerate,
        transform_summary=summary,
        used_surrogate_calls=used_surrogate,
    )
