from app.libs.featsel.cfs import cfs_merit, correlation_ratio
from app.libs.featsel.evaluators import CfsEvaluator, SubsetEvaluator, WrapperEvaluator, wrapper_eval
from app.libs.featsel.rfe import DEFAULT_TOP_K, select_top_k, svm_rfe
from app.libs.featsel.search import DEFAULT_STALE_LIMIT, best_first, greedy_stepwise
from app.libs.featsel.selector import SelectionResult, SelectorConfig, build_evaluator, run_selector

__all__ = [
    "DEFAULT_STALE_LIMIT",
    "DEFAULT_TOP_K",
    "CfsEvaluator",
    "SelectionResult",
    "SelectorConfig",
    "SubsetEvaluator",
    "WrapperEvaluator",
    "best_first",
    "build_evaluator",
    "cfs_merit",
    "correlation_ratio",
    "greedy_stepwise",
    "run_selector",
    "select_top_k",
    "svm_rfe",
    "wrapper_eval",
]
