"""Cross-validation with feature selection inside every training fold."""

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.exception import AlgorithmError, BiomarkerError, DataValidationError, DegenerateStatisticError, FoldFailureError
from app.libs.evaluate.metrics import accuracy, confusion, kappa, prob_errors
from app.libs.featsel import SelectorConfig, run_selector
from app.libs.learners import ClassifierConfig, fit
from app.types import EvalReport, FoldFailure, FoldPlan, LabeledDataset
from app.utils import ordered_map


class FoldOutcome(BaseModel):
    """The held-out predictions of one fold."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    fold: int
    test_indices: list[int]
    probabilities: np.ndarray | None = None
    priors: np.ndarray | None = None
    features: list[str] = Field(default_factory=list)
    failure: str | None = None


def evaluate_fold(
    dataset: LabeledDataset,
    fold_plan: FoldPlan,
    fold: int,
    selector_config: SelectorConfig | None,
    classifier_config: ClassifierConfig,
) -> FoldOutcome:
    """Select, train and predict for one fold; the held-out rows are only used for prediction.

    With no selector every feature is used. Toolkit errors are captured in the outcome.
    """
    test = fold_plan.test_indices(fold)
    with logger.contextualize(fold=fold):
        try:
            train = dataset.take_samples(fold_plan.train_indices(fold))
            if selector_config is None:
                features = list(train.matrix.probeset_ids)
            else:
                features = run_selector(selector_config, train).subset.feature_ids
            model = fit(
                classifier_config.kind,
                train.features(features),
                train.labels,
                class_set=dataset.class_set,
                hyperparameters=classifier_config,
            )
            probabilities = model.predict_proba(dataset.take_samples(test).features(features))
        except BiomarkerError as e:
            logger.warning(f"Fold {fold} failed: {e}")
            return FoldOutcome(fold=fold, test_indices=test.tolist(), failure=str(e))

        counts = train.class_counts()
        priors = np.array([counts.get(label, 0) for label in dataset.class_set], dtype=float)
        logger.debug(f"Fold {fold}: {len(features)} features, {test.size} held out")
        return FoldOutcome(
            fold=fold,
            test_indices=test.tolist(),
            probabilities=probabilities,
            priors=priors / priors.sum(),
            features=features,
        )


def nested_cv(
    dataset: LabeledDataset,
    selector_config: SelectorConfig | None,
    classifier_config: ClassifierConfig,
    fold_plan: FoldPlan,
    workers: int = 1,
    continue_on_failure: bool = False,
) -> EvalReport:
    """Cross-validate a selector and classifier, pooling every held-out prediction.

    For each fold the selector runs on the training rows only, the classifier is fit on
    the training rows restricted to the selected features, and the held-out rows are
    predicted. Predictions are pooled in fold order into one report.

    Args:
        dataset (LabeledDataset): The preprocessed dataset.
        selector_config (SelectorConfig | None): The selector; None uses all features.
        classifier_config (ClassifierConfig): The classifier.
        fold_plan (FoldPlan): The fold assignment, one entry per sample.
        workers (int): Threads over which folds run; results do not depend on it.
        continue_on_failure (bool): Report failed folds instead of aborting.

    Returns:
        EvalReport: The pooled metrics.

    Raises:
        FoldFailureError: On the first failed fold, unless `continue_on_failure`.
    """
    if len(fold_plan.assignment) != dataset.matrix.n_samples:
        raise DataValidationError(
            f"fold plan covers {len(fold_plan.assignment)} samples, dataset has {dataset.matrix.n_samples}"
        )
    outcomes = ordered_map(
        lambda fold: evaluate_fold(dataset, fold_plan, fold, selector_config, classifier_config),
        range(fold_plan.k),
        workers,
    )
    failures = [FoldFailure(fold=o.fold, reason=o.failure) for o in outcomes if o.failure is not None]
    if failures and not continue_on_failure:
        raise FoldFailureError(failures[0].fold, failures[0].reason)
    succeeded = [o for o in outcomes if o.failure is None and o.test_indices]
    if not succeeded:
        raise AlgorithmError("no fold produced predictions")

    indices = [i for o in succeeded for i in o.test_indices]
    probabilities = np.vstack([o.probabilities for o in succeeded])
    priors = np.vstack([np.tile(o.priors, (len(o.test_indices), 1)) for o in succeeded])
    truths = [dataset.labels[i] for i in indices]
    predictions = [dataset.class_set[i] for i in np.argmax(probabilities, axis=1)]

    cm = confusion(predictions, truths, dataset.class_set)
    try:
        agreement = kappa(cm)
    except DegenerateStatisticError:
        logger.warning("Kappa is undefined for this confusion matrix")
        agreement = None
    mae, rmse, rae, rrse = prob_errors(probabilities, truths, dataset.class_set, priors)

    report = EvalReport(
        confusion=cm,
        accuracy=accuracy(cm),
        kappa=agreement,
        mae=mae,
        rmse=rmse,
        rae=rae,
        rrse=rrse,
        n_instances=cm.n_instances,
        complete=not failures,
        failed_folds=failures,
        selected_features=[o.features for o in outcomes],
        config={
            "selector": selector_config.kind if selector_config else "none",
            "search": selector_config.resolved_search() if selector_config else "none",
            "classifier": classifier_config.kind,
            "folds": fold_plan.k,
            "fold_seed": fold_plan.seed,
            "selector_seed": selector_config.seed if selector_config else None,
            "classifier_seed": classifier_config.seed,
        },
    )
    logger.info(
        f"Cross-validation ({report.config['selector']} + {classifier_config.kind}): "
        f"accuracy {report.accuracy:.4f}, kappa {agreement if agreement is None else round(agreement, 4)}"
    )
    return report
