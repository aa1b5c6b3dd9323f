"""One entry point for the three selectors."""

from pydantic import BaseModel, Field

from app.exception import InvalidParameterError
from app.libs.featsel.evaluators import CfsEvaluator, SubsetEvaluator, WrapperEvaluator
from app.libs.featsel.rfe import DEFAULT_TOP_K, select_top_k, svm_rfe
from app.libs.featsel.search import DEFAULT_STALE_LIMIT, best_first, greedy_stepwise
from app.libs.learners import ClassifierConfig
from app.types import ClassifierKind, FeatureRanking, FeatureSubset, LabeledDataset, SearchKind, SelectorKind


class SelectorConfig(BaseModel):
    """How to select features."""

    kind: SelectorKind = "rsvm"
    """wse (wrapper), cfs or rsvm (recursive SVM elimination)."""

    search: SearchKind | None = None
    """The search; defaults to greedy for wse/cfs and ranker for rsvm."""

    top_k: int = Field(default=DEFAULT_TOP_K, ge=1)
    """The features kept from an rsvm ranking."""

    internal_folds: int = Field(default=5, ge=2)
    """The internal folds of the wrapper."""

    wrapper_classifier: ClassifierKind = "decision_table"
    """The base learner of the wrapper."""

    stale_limit: int = Field(default=DEFAULT_STALE_LIMIT, ge=0)
    """The best-first stale limit."""

    eliminate_per_iteration: int = Field(default=1, ge=1)
    """Features dropped per RFE iteration."""

    eliminate_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)
    """Fraction of surviving features dropped per RFE iteration (0 disables)."""

    C: float = Field(default=1.0, gt=0.0)
    """The SVM penalty of RFE."""

    seed: int = 0
    """The seed of the wrapper's internal folds and learner."""

    workers: int = Field(default=1, ge=1)
    """Threads for wrapper candidate scoring."""

    def resolved_search(self) -> SearchKind:
        """Get the search, defaulting to `ranker` for rsvm and `greedy` otherwise.

        Raises:
            InvalidParameterError: If rsvm is paired with a subset search or another selector with `ranker`.
        """
        search = self.search or ("ranker" if self.kind == "rsvm" else "greedy")
        if (self.kind == "rsvm") != (search == "ranker"):
            raise InvalidParameterError(f"selector {self.kind} cannot use search {search}")
        return search


class SelectionResult(BaseModel):
    """The outcome of a selector run."""

    subset: FeatureSubset
    """The selected features."""

    ranking: FeatureRanking | None = None
    """The full ranking, for rsvm."""


def build_evaluator(config: SelectorConfig, dataset: LabeledDataset) -> SubsetEvaluator:
    """Build the subset evaluator of a search-based selector.

    Args:
        config (SelectorConfig): The selector settings; `cfs` gets the merit evaluator, any
            other kind the wrapper around `wrapper_classifier`.
        dataset (LabeledDataset): The training data the subsets are scored on.

    Returns:
        SubsetEvaluator: The evaluator.
    """
    if config.kind == "cfs":
        return CfsEvaluator(dataset)
    return WrapperEvaluator(
        dataset,
        classifier=ClassifierConfig(kind=config.wrapper_classifier, seed=config.seed),
        internal_folds=config.internal_folds,
        seed=config.seed,
        workers=config.workers,
    )


def run_selector(config: SelectorConfig, dataset: LabeledDataset) -> SelectionResult:
    """Run the configured selector on a (training) dataset.

    Args:
        config (SelectorConfig): The selector and its search.
        dataset (LabeledDataset): The data to select from; only these rows are seen.

    Returns:
        SelectionResult: The subset, plus the ranking for rsvm.
    """
    search = config.resolved_search()
    if config.kind == "rsvm":
        ranking = svm_rfe(
            dataset,
            eliminate_per_iteration=config.eliminate_per_iteration,
            C=config.C,
            eliminate_fraction=config.eliminate_fraction,
        )
        return SelectionResult(subset=select_top_k(ranking, min(config.top_k, len(ranking.feature_ids))), ranking=ranking)

    evaluator = build_evaluator(config, dataset)
    if search == "bestfirst":
        return SelectionResult(subset=best_first(evaluator, stale_limit=config.stale_limit))
    return SelectionResult(subset=greedy_stepwise(evaluator))
