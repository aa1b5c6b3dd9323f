"""Train, apply and serialize classifiers of any kind."""

from typing import Annotated, Sequence

import numpy as np
from loguru import logger
from pydantic import Field, TypeAdapter, ValidationError

from app.exception import DataFormatError, InvalidParameterError
from app.libs.learners.base import MODEL_FORMAT_VERSION, ClassifierConfig, ClassifierModel, validate_training_data
from app.libs.learners.decision_table import DecisionTableModel, fit_decision_table
from app.libs.learners.lvq import LVQModel, fit_lvq
from app.libs.learners.naive_bayes import NaiveBayesModel, fit_naive_bayes
from app.libs.learners.svm import LinearSVMModel, PairwiseMachine, fit_linear_svm
from app.types import ClassifierKind

AnyModel = Annotated[
    NaiveBayesModel | LinearSVMModel | LVQModel | DecisionTableModel,
    Field(discriminator="kind"),
]
_model_adapter: TypeAdapter[AnyModel] = TypeAdapter(AnyModel)


def fit(
    kind: ClassifierKind,
    X: np.ndarray,
    labels: Sequence[str],
    class_set: Sequence[str] | None = None,
    hyperparameters: ClassifierConfig | None = None,
    seed: int | None = None,
) -> ClassifierModel:
    """Train a classifier.

    Args:
        kind (ClassifierKind): naive_bayes, linear_svm, lvq or decision_table.
        X (np.ndarray): The training samples, shape (n, features).
        labels (Sequence[str]): The label of each sample.
        class_set (Sequence[str] | None): The class order. Defaults to first appearance.
        hyperparameters (ClassifierConfig | None): The hyperparameters. Defaults to `ClassifierConfig()`.
        seed (int | None): Overrides `hyperparameters.seed`.

    Returns:
        ClassifierModel: The trained model.

    Raises:
        DataValidationError: On an empty class or NaN features.
    """
    params = hyperparameters or ClassifierConfig()
    seed = params.seed if seed is None else seed
    X, codes, classes = validate_training_data(X, list(labels), list(class_set) if class_set is not None else None)

    match kind:
        case "naive_bayes":
            model = fit_naive_bayes(X, codes, classes, params.nb_variance_floor)
        case "linear_svm":
            model = fit_linear_svm(X, codes, classes, C=params.C, tolerance=params.svm_tolerance, max_iter=params.svm_max_iter)
        case "lvq":
            model = fit_lvq(
                X,
                codes,
                classes,
                prototypes_per_class=params.lvq_prototypes,
                learning_rate=params.lvq_learning_rate,
                epochs=params.lvq_epochs,
                seed=seed,
            )
        case "decision_table":
            model = fit_decision_table(X, codes, classes, bins=params.dtable_bins)
        case _:
            raise InvalidParameterError(f"unknown classifier kind: {kind!r}")
    logger.debug(f"Trained {kind} on {X.shape[0]} samples x {X.shape[1]} features")
    return model


def predict_proba(model: ClassifierModel, sample: np.ndarray) -> np.ndarray:
    """The class distribution of one sample (1-D) or of each row of a batch (2-D)."""
    sample = np.asarray(sample, dtype=float)
    proba = model.predict_proba(sample)
    return proba[0] if sample.ndim == 1 else proba


def predict(model: ClassifierModel, sample: np.ndarray) -> str | list[str]:
    """The argmax class of one sample or of each row of a batch; ties go to the earlier class."""
    sample = np.asarray(sample, dtype=float)
    labels = model.predict(sample)
    return labels[0] if sample.ndim == 1 else labels


def svm_weights(model: ClassifierModel) -> list[PairwiseMachine]:
    """The primal weight vector and bias of each pairwise machine of a linear SVM.

    Raises:
        InvalidParameterError: When the model is not a linear SVM.
    """
    if not isinstance(model, LinearSVMModel):
        raise InvalidParameterError(f"svm_weights needs a linear_svm model, got {model.kind}")
    return list(model.machines)


def save_model(model: ClassifierModel) -> str:
    """Serialize a model to its versioned JSON document."""
    return model.model_dump_json(indent=2)


def load_model(document: str) -> ClassifierModel:
    """Parse a JSON model document.

    Raises:
        DataFormatError: On malformed JSON, an unknown kind or an unsupported format version.
    """
    try:
        model = _model_adapter.validate_json(document)
    except ValidationError as e:
        raise DataFormatError(f"invalid model document: {e.errors()[0]['msg']}") from e
    if model.format_version != MODEL_FORMAT_VERSION:
        raise DataFormatError(f"unsupported model format version {model.format_version}")
    return model
