"""Subset evaluators driven by the search strategies."""

from typing import Literal, Sequence

import numpy as np
from loguru import logger

from app.exception import DataValidationError, InvalidParameterError
from app.libs.featsel.cfs import correlation_ratio, merit_from_sums, snap_unit, standardized_columns
from app.libs.learners import ClassifierConfig, fit
from app.types import ClassifierKind, LabeledDataset
from app.utils import ordered_map


class SubsetEvaluator:
    """Scores feature subsets of one dataset.

    Subclasses implement `score`; `score_candidates` may be overridden with a faster
    incremental version.
    """

    name: Literal["cfs", "wrapper"]

    def __init__(self, dataset: LabeledDataset):
        self.dataset = dataset
        self.feature_ids = list(dataset.matrix.probeset_ids)
        self._position = {feature: i for i, feature in enumerate(self.feature_ids)}

    def positions(self, features: Sequence[str]) -> np.ndarray:
        """The column positions of the features in the dataset."""
        return np.array([self._position[f] for f in features], dtype=int)

    def score(self, subset: Sequence[str]) -> float:
        """Score a feature subset.

        Args:
            subset (Sequence[str]): The feature IDs, nonempty.

        Returns:
            float: The merit, higher is better.
        """
        raise NotImplementedError

    def score_candidates(self, selected: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        """The score of `selected` plus each candidate, in candidate order."""
        return np.array([self.score([*selected, candidate]) for candidate in candidates], dtype=float)


class CfsEvaluator(SubsetEvaluator):
    """CFS merit with precomputed class correlations and standardized columns."""

    name = "cfs"

    def __init__(self, dataset: LabeledDataset):
        super().__init__(dataset)
        X = dataset.features()
        if X.shape[0] < 2:  # noqa: PLR2004
            raise DataValidationError("CFS needs at least two samples")
        self._r_cf = correlation_ratio(X, dataset.class_codes, len(dataset.class_set))
        self._z = standardized_columns(X)
        self._n = X.shape[0]

    def _r_ff(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return snap_unit(self._z[:, left].T @ self._z[:, right] / (self._n - 1))

    def score(self, subset: Sequence[str]) -> float:
        chosen = self.positions(subset)
        pairs = self._r_ff(chosen, chosen)
        sum_ff = (pairs.sum() - np.trace(pairs)) / 2.0
        return float(merit_from_sums(chosen.size, self._r_cf[chosen].sum(), sum_ff))

    def score_candidates(self, selected: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        chosen = self.positions(selected)
        extra = self.positions(candidates)
        base_cf = self._r_cf[chosen].sum()
        if chosen.size:
            pairs = self._r_ff(chosen, chosen)
            base_ff = (pairs.sum() - np.trace(pairs)) / 2.0
            added_ff = self._r_ff(chosen, extra).sum(axis=0)
        else:
            base_ff = 0.0
            added_ff = np.zeros(extra.size)
        return merit_from_sums(chosen.size + 1, base_cf + self._r_cf[extra], base_ff + added_ff)


class WrapperEvaluator(SubsetEvaluator):
    """Mean stratified-CV accuracy of a classifier restricted to the subset."""

    name = "wrapper"

    def __init__(
        self,
        dataset: LabeledDataset,
        classifier: ClassifierConfig | None = None,
        internal_folds: int = 5,
        seed: int = 0,
        workers: int = 1,
    ):
        """Prepare the internal folds.

        Args:
            dataset (LabeledDataset): The training data.
            classifier (ClassifierConfig | None): The base learner. Defaults to a decision table.
            internal_folds (int): The internal fold count.
            seed (int): The seed of the internal folds and the learner.
            workers (int): Threads over which candidates are scored.

        Raises:
            InvalidParameterError: When internal_folds < 2.
            DataValidationError: When a class has fewer samples than internal_folds.
        """
        # avoid circular import
        from app.libs.evaluate.folds import stratified_folds  # noqa: PLC0415

        super().__init__(dataset)
        if internal_folds < 2:  # noqa: PLR2004
            raise InvalidParameterError(f"internal_folds must be at least 2, got {internal_folds}")
        small = {label: n for label, n in dataset.class_counts().items() if n < internal_folds}
        if small:
            raise DataValidationError(
                f"classes too small for {internal_folds} internal folds: "
                + ", ".join(f"{label} ({n})" for label, n in small.items())
            )
        self.classifier = classifier or ClassifierConfig(kind="decision_table", seed=seed)
        self.seed = seed
        self.workers = workers
        self.plan = stratified_folds(dataset.labels, k=internal_folds, seed=seed)
        self._X = dataset.features()
        self._labels = np.asarray(dataset.labels)
        self._cache: dict[frozenset[str], float] = {}

    def score(self, subset: Sequence[str]) -> float:
        key = frozenset(subset)
        if key in self._cache:
            return self._cache[key]
        X = self._X[:, self.positions(sorted(key))]
        accuracies = []
        for fold in range(self.plan.k):
            train, test = self.plan.train_indices(fold), self.plan.test_indices(fold)
            model = fit(
                self.classifier.kind,
                X[train],
                self._labels[train].tolist(),
                class_set=self.dataset.class_set,
                hyperparameters=self.classifier,
                seed=self.seed,
            )
            accuracies.append(float(np.mean(np.asarray(model.predict(X[test])) == self._labels[test])))
        self._cache[key] = value = float(np.mean(accuracies))
        return value

    def score_candidates(self, selected: Sequence[str], candidates: Sequence[str]) -> np.ndarray:
        scores = ordered_map(lambda candidate: self.score([*selected, candidate]), list(candidates), self.workers)
        logger.debug(f"Wrapper scored {len(candidates)} candidates on top of {len(selected)} features")
        return np.asarray(scores, dtype=float)


def wrapper_eval(
    subset: Sequence[str],
    dataset: LabeledDataset,
    base_learner: ClassifierKind = "decision_table",
    internal_folds: int = 5,
    seed: int = 0,
) -> float:
    """Mean stratified internal-CV accuracy of `base_learner` on the subset's columns; deterministic given seed."""
    evaluator = WrapperEvaluator(
        dataset, classifier=ClassifierConfig(kind=base_learner, seed=seed), internal_folds=internal_folds, seed=seed
    )
    return evaluator.score(subset)
