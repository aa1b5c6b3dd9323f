"""Preprocess.

Reliability filtering, noise-floor removal, outlier handling, log transform and z-score.
"""

from app.libs.preprocess.chain import PreprocessOptions, PreprocessResult, run_preprocessing
from app.libs.preprocess.filters import filter_by_present_calls, filter_noise_floor, surrogate_calls
from app.libs.preprocess.outliers import detect_outliers, impute_outliers
from app.libs.preprocess.transform import log_transform, transform_summary, zscore

__all__ = [
    "PreprocessOptions",
    "PreprocessResult",
    "detect_outliers",
    "filter_by_present_calls",
    "filter_noise_floor",
    "impute_outliers",
    "log_transform",
    "run_preprocessing",
    "surrogate_calls",
    "transform_summary",
    "zscore",
]
