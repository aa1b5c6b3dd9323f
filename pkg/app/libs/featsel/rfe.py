"""Recursive feature elimination with linear SVMs."""

import math

import numpy as np
from loguru import logger

from app.exception import DataValidationError, InvalidParameterError
from app.libs.learners import ClassifierConfig, fit, svm_weights
from app.types import FeatureRanking, FeatureSubset, LabeledDataset

DEFAULT_TOP_K = 20


def svm_rfe(
    dataset: LabeledDataset,
    eliminate_per_iteration: int = 1,
    C: float = 1.0,
    eliminate_fraction: float = 0.0,
    hyperparameters: ClassifierConfig | None = None,
) -> FeatureRanking:
    """Rank features by recursive elimination.

    Each iteration trains the one-vs-one linear SVM on the surviving features, scores
    feature i by the sum over pairwise machines of w_i^2 and drops the lowest scorers
    (ties by feature ID). Features are not rescaled between iterations. The last
    survivor is not retrained.

    Args:
        dataset (LabeledDataset): The training data.
        eliminate_per_iteration (int): Features dropped per iteration.
        C (float): The SVM penalty.
        eliminate_fraction (float): When positive, drop max(eliminate_per_iteration,
            floor(fraction x surviving)) per iteration instead.
        hyperparameters (ClassifierConfig | None): SMO settings; `C` overrides its penalty.

    Returns:
        FeatureRanking: Every feature, most important first, with the criterion it had
        when it was eliminated.
    """
    if eliminate_per_iteration < 1:
        raise InvalidParameterError(f"eliminate_per_iteration must be at least 1, got {eliminate_per_iteration}")
    if not 0.0 <= eliminate_fraction < 1.0:
        raise InvalidParameterError(f"eliminate_fraction must lie in [0, 1), got {eliminate_fraction}")
    dataset.require_classes(2)
    if dataset.matrix.n_probesets < 2:  # noqa: PLR2004
        raise DataValidationError("svm_rfe needs at least two features")

    params = (hyperparameters or ClassifierConfig()).model_copy(update={"kind": "linear_svm", "C": C})
    surviving = list(dataset.matrix.probeset_ids)
    eliminated: list[str] = []
    criteria: dict[str, float] = {}
    trainings = 0

    while len(surviving) > 1:
        model = fit("linear_svm", dataset.features(surviving), dataset.labels, dataset.class_set, params)
        trainings += 1
        weight = np.sum([np.asarray(machine.weights) ** 2 for machine in svm_weights(model)], axis=0)
        order = sorted(range(len(surviving)), key=lambda i: (weight[i], surviving[i]))
        for i, feature in enumerate(surviving):
            criteria[feature] = float(weight[i])

        step = max(eliminate_per_iteration, math.floor(eliminate_fraction * len(surviving)))
        dropped = [surviving[i] for i in order[:step]]
        eliminated.extend(dropped)
        dropped_set = set(dropped)
        surviving = [feature for feature in surviving if feature not in dropped_set]
        logger.debug(f"RFE iteration {trainings}: dropped {len(dropped)}, {len(surviving)} left")

    eliminated.extend(surviving)
    ranking = eliminated[::-1]
    logger.info(f"SVM-RFE ranked {len(ranking)} features with {trainings} trainings")
    return FeatureRanking(feature_ids=ranking, criteria=[criteria[f] for f in ranking], trainings=trainings)


def select_top_k(ranking: FeatureRanking, k: int = DEFAULT_TOP_K) -> FeatureSubset:
    """The first k features of a ranking; the score is the smallest criterion kept.

    Raises:
        InvalidParameterError: When k is outside [1, len(ranking)].
    """
    if not 1 <= k <= len(ranking.feature_ids):
        raise InvalidParameterError(f"k must lie in [1, {len(ranking.feature_ids)}], got {k}")
    return FeatureSubset(
        feature_ids=ranking.feature_ids[:k], score=float(min(ranking.criteria[:k])), evaluator="ranker"
    )
