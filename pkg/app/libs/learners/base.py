"""Base classifier model and the shared hyperparameters."""

import numpy as np
from pydantic import BaseModel, Field

from app.exception import DataValidationError
from app.types import ClassifierKind

MODEL_FORMAT_VERSION = 1


class ClassifierConfig(BaseModel):
    """Hyperparameters of every classifier kind; each kind reads its own."""

    kind: ClassifierKind = "linear_svm"
    """The classifier to train."""

    C: float = Field(default=1.0, gt=0.0)
    """The SVM soft-margin penalty."""

    svm_tolerance: float = Field(default=1e-3, gt=0.0)
    """The SMO stopping tolerance on the maximal KKT violation."""

    svm_max_iter: int = Field(default=100_000, ge=1)
    """The SMO iteration budget per pairwise machine."""

    nb_variance_floor: float = Field(default=1e-6, gt=0.0)
    """The minimum Naive Bayes variance."""

    lvq_prototypes: int = Field(default=4, ge=1)
    """The LVQ prototypes per class."""

    lvq_learning_rate: float = Field(default=0.3, ge=0.0)
    """The initial LVQ learning rate, decaying linearly to 0."""

    lvq_epochs: int = Field(default=1000, ge=1)
    """The LVQ training epochs."""

    dtable_bins: int = Field(default=10, ge=1)
    """The equal-frequency bins per decision-table feature."""

    seed: int = 0
    """The seed of randomized learners."""


class ClassifierModel(BaseModel):
    """Base class for a trained classifier.

    Subclasses set a literal `kind` and implement `_proba`.
    """

    format_version: int = MODEL_FORMAT_VERSION
    """The version of the serialized document."""

    kind: ClassifierKind
    """The classifier kind."""

    class_set: list[str]
    """The class labels, in output order."""

    n_features: int
    """The feature dimension seen in training."""

    def _proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Class distributions of a batch of samples.

        Args:
            X (np.ndarray): The samples, shape (n, features).

        Returns:
            np.ndarray: The distributions, shape (n, classes); rows sum to 1.

        Raises:
            DataValidationError: On a feature dimension mismatch.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DataValidationError(f"model expects {self.n_features} features, got {X.shape[1]}")
        proba = np.clip(self._proba(X), 0.0, None)
        return proba / proba.sum(axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> list[str]:
        """The most probable class of each sample; ties go to the earlier class."""
        return [self.class_set[i] for i in np.argmax(self.predict_proba(X), axis=1)]


def validate_training_data(
    X: np.ndarray, labels: list[str], class_set: list[str] | None = None
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Check a training set and encode its labels.

    Args:
        X (np.ndarray): The samples, shape (n, features).
        labels (list[str]): The label of each sample.
        class_set (list[str] | None): The class order. Defaults to first appearance.

    Returns:
        tuple[np.ndarray, np.ndarray, list[str]]: The float matrix, the class codes and the class set.

    Raises:
        DataValidationError: On NaN features, misaligned labels, unknown labels or empty classes.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:  # noqa: PLR2004
        raise DataValidationError("training data must be a samples x features matrix with at least one feature")
    if X.shape[0] != len(labels):
        raise DataValidationError(f"{X.shape[0]} samples but {len(labels)} labels")
    if not np.all(np.isfinite(X)):
        raise DataValidationError("training features contain NaN or infinite values")

    class_set = list(class_set) if class_set is not None else list(dict.fromkeys(labels))
    index = {label: i for i, label in enumerate(class_set)}
    unknown = sorted(set(labels) - set(index))
    if unknown:
        raise DataValidationError(f"labels not in class set: {', '.join(unknown)}")
    codes = np.array([index[label] for label in labels], dtype=int)
    empty = [label for i, label in enumerate(class_set) if not np.any(codes == i)]
    if empty:
        raise DataValidationError(f"classes without training samples: {', '.join(empty)}")
    return X, codes, class_set
