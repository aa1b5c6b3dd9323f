"""Decision table over equal-frequency discretized features."""

from typing import Literal

import numpy as np

from app.libs.learners.base import ClassifierModel


def _bins(X: np.ndarray, cut_points: list[list[float]]) -> np.ndarray:
    # bin index = number of cut points <= value
    return np.stack(
        [np.searchsorted(np.asarray(cuts), X[:, f], side="right") for f, cuts in enumerate(cut_points)], axis=1
    )


def _key(row: np.ndarray) -> str:
    return ",".join(str(int(v)) for v in row)


class DecisionTableModel(ClassifierModel):
    """Class distributions keyed by the tuple of feature bins, with a global fallback."""

    kind: Literal["decision_table"] = "decision_table"

    cut_points: list[list[float]]
    """The sorted interior cut points of each feature."""

    cells: dict[str, list[float]]
    """The class distribution of each observed bin tuple."""

    fallback: list[float]
    """The global class distribution, used for unseen cells."""

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.cells.get(_key(row), self.fallback) for row in _bins(X, self.cut_points)], dtype=float)


def fit_decision_table(X: np.ndarray, codes: np.ndarray, class_set: list[str], bins: int = 10) -> DecisionTableModel:
    """Discretize each feature into `bins` equal-frequency bins and tabulate the classes per cell.

    Cut points are the distinct interior quantiles of the training column, so a feature
    with few distinct values gets fewer bins.
    """
    levels = np.arange(1, bins) / bins
    cut_points = [np.unique(np.quantile(X[:, f], levels)).tolist() if bins > 1 else [] for f in range(X.shape[1])]
    n_classes = len(class_set)

    counts: dict[str, np.ndarray] = {}
    for row, code in zip(_bins(X, cut_points), codes, strict=True):
        counts.setdefault(_key(row), np.zeros(n_classes))[code] += 1
    fallback = np.bincount(codes, minlength=n_classes) / codes.size
    return DecisionTableModel(
        class_set=class_set,
        n_features=X.shape[1],
        cut_points=cut_points,
        cells={key: (count / count.sum()).tolist() for key, count in counts.items()},
        fallback=fallback.tolist(),
    )
