from app.libs.evaluate.folds import DEFAULT_FOLDS, stratified_folds
from app.libs.evaluate.metrics import accuracy, confusion, kappa, prob_errors
from app.libs.evaluate.nested_cv import FoldOutcome, evaluate_fold, nested_cv

__all__ = [
    "DEFAULT_FOLDS",
    "FoldOutcome",
    "accuracy",
    "confusion",
    "evaluate_fold",
    "kappa",
    "nested_cv",
    "prob_errors",
    "stratified_folds",
]
