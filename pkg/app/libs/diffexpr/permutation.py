"""Permutation and parametric p-values for every probeset."""

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict
from scipy import stats as distributions

from app.exception import InvalidParameterError
from app.libs.diffexpr.statistics import batch_statistics, class_moments, standardize_rows
from app.types import LabeledDataset, PermutationPlan, StatisticKind
from app.utils import chunk_ranges, derive_rng, ordered_map

# relative slack so that a permuted statistic equal to the observed one counts as exceeding it
TIE_TOLERANCE = 1e-12


class PValueResult(BaseModel):
    """Observed statistics and p-values of every probeset."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    statistics: np.ndarray
    """The observed statistic of each probeset (NaN when degenerate)."""

    raw_p: np.ndarray
    """The p-value of each probeset, in (0, 1]."""

    degenerate: np.ndarray
    """Whether the statistic of each probeset is undefined."""


def _observed(dataset: LabeledDataset, kind: StatisticKind) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dataset.require_classes(2)
    rows, constant = standardize_rows(dataset.matrix.values)
    observed, undefined = batch_statistics(rows, dataset.class_codes, len(dataset.class_set), kind)
    degenerate = constant | undefined | ~np.isfinite(observed)
    return rows, observed, degenerate


def permutation_pvalues(
    dataset: LabeledDataset, statistic_kind: StatisticKind, plan: PermutationPlan, workers: int = 1
) -> PValueResult:
    """Estimate p-values by permuting the class labels.

    Round b shuffles the labels with a generator seeded by (plan.seed, b); every probeset
    sees the same shuffle in a round. p = (1 + #{b : |S_b| >= |S_obs|}) / (1 + B).

    Args:
        dataset (LabeledDataset): The preprocessed dataset.
        statistic_kind (StatisticKind): "t", "snr" or "f".
        plan (PermutationPlan): The number of rounds and the seed.
        workers (int): Threads over which rounds are split; results do not depend on it.

    Returns:
        PValueResult: The observed statistics, p-values and degeneracy flags.
    """
    rows, observed, degenerate = _observed(dataset, statistic_kind)
    codes = dataset.class_codes
    n_classes = len(dataset.class_set)
    threshold = np.abs(np.where(degenerate, 0.0, observed)) * (1 - TIE_TOLERANCE)

    def count_exceedances(rounds: range) -> np.ndarray:
        exceed = np.zeros(rows.shape[0], dtype=np.int64)
        for b in rounds:
            shuffled = derive_rng(plan.seed, b).permutation(codes)
            permuted, _ = batch_statistics(rows, shuffled, n_classes, statistic_kind)
            exceed += np.abs(permuted) >= threshold
        logger.debug(f"Permutation rounds {rounds.start}-{rounds.stop - 1} done")
        return exceed

    chunks = chunk_ranges(plan.permutation_count, max(1, workers) * 4)
    exceed = np.sum(ordered_map(count_exceedances, chunks, workers), axis=0)
    raw_p = (1.0 + exceed) / (1.0 + plan.permutation_count)
    raw_p = np.where(degenerate, 1.0, raw_p)
    if degenerate.any():
        logger.warning(f"{int(degenerate.sum())} probesets have an undefined statistic and get p = 1")
    logger.info(f"Permutation test ({statistic_kind}, B={plan.permutation_count}) done")
    return PValueResult(statistics=np.where(degenerate, np.nan, observed), raw_p=raw_p, degenerate=degenerate)


def parametric_pvalues(dataset: LabeledDataset, statistic_kind: StatisticKind) -> PValueResult:
    """P-values from the reference distributions of the statistics.

    Welch t (two classes) uses the t distribution with Welch-Satterthwaite degrees of
    freedom, two-sided; F uses the F distribution. SNR has no reference distribution.

    Args:
        dataset (LabeledDataset): The preprocessed dataset.
        statistic_kind (StatisticKind): "t" (two classes only) or "f".

    Returns:
        PValueResult: The observed statistics, p-values and degeneracy flags.

    Raises:
        InvalidParameterError: For SNR, or t with more than two classes.
    """
    n_classes = len(dataset.class_set)
    if statistic_kind == "snr" or (statistic_kind == "t" and n_classes != 2):  # noqa: PLR2004
        raise InvalidParameterError(
            f"no parametric null for statistic {statistic_kind!r} with {n_classes} classes; use permutations"
        )
    rows, observed, degenerate = _observed(dataset, statistic_kind)
    safe = np.where(degenerate, 0.0, observed)

    if statistic_kind == "f":
        sizes = np.bincount(dataset.class_codes, minlength=n_classes)
        raw_p = distributions.f.sf(safe, n_classes - 1, sizes.sum() - n_classes)
    else:
        sizes, _, squares = class_moments(rows, dataset.class_codes, n_classes)
        ratio = squares / (sizes - 1) / sizes
        numerator = ratio.sum(axis=1) ** 2
        denominator = (ratio**2 / (sizes - 1)).sum(axis=1)
        df = np.where(denominator > 0, numerator / np.where(denominator > 0, denominator, 1.0), 1.0)
        raw_p = 2.0 * distributions.t.sf(np.abs(safe), df)

    raw_p = np.clip(raw_p, np.finfo(float).tiny, 1.0)
    raw_p = np.where(degenerate, 1.0, raw_p)
    logger.info(f"Parametric p-values ({statistic_kind}) done")
    return PValueResult(statistics=np.where(degenerate, np.nan, observed), raw_p=raw_p, degenerate=degenerate)
