"""Gaussian Naive Bayes."""

from typing import Literal

import numpy as np
from scipy.special import logsumexp

from app.libs.learners.base import ClassifierModel


class NaiveBayesModel(ClassifierModel):
    """Per-class Gaussian likelihoods with class-frequency priors."""

    kind: Literal["naive_bayes"] = "naive_bayes"

    means: list[list[float]]
    """The mean of each (class, feature)."""

    variances: list[list[float]]
    """The floored variance of each (class, feature)."""

    priors: list[float]
    """The class frequencies."""

    def _proba(self, X: np.ndarray) -> np.ndarray:
        means = np.asarray(self.means)
        variances = np.asarray(self.variances)
        log_likelihood = -0.5 * (
            np.log(2 * np.pi * variances).sum(axis=1)[None, :]
            + (((X[:, None, :] - means[None, :, :]) ** 2) / variances[None, :, :]).sum(axis=2)
        )
        joint = log_likelihood + np.log(np.asarray(self.priors))[None, :]
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))


def fit_naive_bayes(X: np.ndarray, codes: np.ndarray, class_set: list[str], variance_floor: float) -> NaiveBayesModel:
    """Estimate per-class means, variances and priors.

    Variances use n-1 when a class has more than one sample and are floored at `variance_floor`.
    """
    means, variances, priors = [], [], []
    for code in range(len(class_set)):
        members = X[codes == code]
        means.append(members.mean(axis=0))
        spread = members.var(axis=0, ddof=1) if members.shape[0] > 1 else np.zeros(X.shape[1])
        variances.append(np.maximum(spread, variance_floor))
        priors.append(members.shape[0] / X.shape[0])
    return NaiveBayesModel(
        class_set=class_set,
        n_features=X.shape[1],
        means=np.array(means).tolist(),
        variances=np.array(variances).tolist(),
        priors=priors,
    )
