"""Stratified fold assignment."""

from typing import Sequence

import numpy as np

from app.exception import DataValidationError, InvalidParameterError
from app.types import FoldPlan
from app.utils import derive_rng

DEFAULT_FOLDS = 10


def stratified_folds(labels: Sequence[str], k: int = DEFAULT_FOLDS, seed: int = 0) -> FoldPlan:
    """Assign samples to k folds, class by class.

    Classes are taken in order of first appearance. Each class is shuffled with a
    generator seeded by (seed, class index) and dealt round-robin, continuing from the
    fold where the previous class stopped, so fold sizes differ by at most one overall
    and per class.

    Args:
        labels (Sequence[str]): The label of each sample.
        k (int): The number of folds, 2 <= k <= len(labels).
        seed (int): The shuffle seed.

    Returns:
        FoldPlan: The assignment.

    Raises:
        InvalidParameterError: When k is out of range.
    """
    n = len(labels)
    if n == 0:
        raise DataValidationError("cannot build folds without samples")
    if not 2 <= k <= n:  # noqa: PLR2004
        raise InvalidParameterError(f"fold count must lie in [2, {n}], got {k}")

    labels = np.asarray(labels)
    assignment = np.empty(n, dtype=int)
    offset = 0
    for class_index, label in enumerate(dict.fromkeys(labels.tolist())):
        members = derive_rng(seed, class_index).permutation(np.flatnonzero(labels == label))
        assignment[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return FoldPlan(k=k, assignment=assignment.tolist(), seed=seed)
