"""Forward subset searches: greedy stepwise and best first."""

import heapq
from typing import Literal

import numpy as np
from loguru import logger

from app.exception import InvalidParameterError, SelectionError
from app.libs.featsel.evaluators import SubsetEvaluator
from app.types import FeatureSubset, SearchStep

DEFAULT_STALE_LIMIT = 5


def greedy_stepwise(evaluator: SubsetEvaluator, direction: Literal["forward"] = "forward") -> FeatureSubset:
    """Grow a subset from empty, adding the best candidate while the score strictly improves.

    Candidates are scored in feature-ID order, so ties go to the smallest ID.

    Args:
        evaluator (SubsetEvaluator): Scores subsets of its dataset.
        direction (Literal["forward"]): Only forward search is supported.

    Returns:
        FeatureSubset: The subset, its score and the trace of accepted additions.

    Raises:
        SelectionError: When no single feature has a positive score.
    """
    if direction != "forward":
        raise InvalidParameterError(f"unsupported search direction: {direction!r}")
    remaining = sorted(evaluator.feature_ids)
    if not remaining:
        raise SelectionError("no features to search")

    selected: list[str] = []
    trace: list[SearchStep] = []
    current = 0.0
    while remaining:
        scores = evaluator.score_candidates(selected, remaining)
        best = int(np.argmax(scores))
        if scores[best] <= current:
            break
        current = float(scores[best])
        feature = remaining.pop(best)
        selected.append(feature)
        trace.append(SearchStep(feature_id=feature, score=current))
        logger.debug(f"Greedy added {feature} ({evaluator.name} = {current:.4f})")

    if not selected:
        raise SelectionError("no informative start: no single feature has a positive score")
    logger.info(f"Greedy search selected {len(selected)} features, {evaluator.name} = {current:.4f}")
    return FeatureSubset(feature_ids=selected, score=current, evaluator=evaluator.name, trace=trace)


def best_first(evaluator: SubsetEvaluator, stale_limit: int = DEFAULT_STALE_LIMIT) -> FeatureSubset:
    """Best-first forward search over subsets.

    The open list is ordered by score, then by the sorted feature tuple. Each expansion
    scores every single-feature addition to the best open node; subsets already seen are
    skipped. The search stops once the number of consecutive expansions without a new
    global best exceeds `stale_limit`, or when the open list is empty.

    Args:
        evaluator (SubsetEvaluator): Scores subsets of its dataset.
        stale_limit (int): The tolerated run of non-improving expansions.

    Returns:
        FeatureSubset: The best subset seen; its trace is the addition path that reached it.

    Raises:
        SelectionError: When no subset has a positive score.
    """
    if stale_limit < 0:
        raise InvalidParameterError(f"stale_limit must be nonnegative, got {stale_limit}")
    features = sorted(evaluator.feature_ids)
    if not features:
        raise SelectionError("no features to search")

    # (negated score, sorted key, addition order, trace)
    open_list: list[tuple[float, tuple[str, ...], tuple[str, ...], tuple[SearchStep, ...]]] = [(0.0, (), (), ())]
    visited: set[tuple[str, ...]] = set()
    best_score, best_order, best_trace = 0.0, (), ()
    stale = 0
    expansions = 0

    while open_list:
        _, _, order, path = heapq.heappop(open_list)
        members = set(order)
        children = [f for f in features if f not in members]
        if not children:
            continue
        expansions += 1
        scores = evaluator.score_candidates(list(order), children)
        improved = False
        for feature, score in zip(children, scores, strict=True):
            key = tuple(sorted((*order, feature)))
            if key in visited:
                continue
            visited.add(key)
            child_order = (*order, feature)
            child_path = (*path, SearchStep(feature_id=feature, score=float(score)))
            heapq.heappush(open_list, (-float(score), key, child_order, child_path))
            if score > best_score:
                best_score, best_order, best_trace = float(score), child_order, child_path
                improved = True
        stale = 0 if improved else stale + 1
        if stale > stale_limit:
            break

    if not best_order:
        raise SelectionError("no informative start: no single feature has a positive score")
    logger.info(
        f"Best-first search selected {len(best_order)} features after {expansions} expansions, "
        f"{evaluator.name} = {best_score:.4f}"
    )
    return FeatureSubset(
        feature_ids=list(best_order), score=best_score, evaluator=evaluator.name, trace=list(best_trace)
    )
