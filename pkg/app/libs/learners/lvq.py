"""Learning vector quantization (LVQ1)."""

from typing import Literal

import numpy as np

from app.libs.learners.base import ClassifierModel
from app.utils import derive_rng

# keeps a query sitting on a prototype finite
DISTANCE_EPSILON = 1e-12


class LVQModel(ClassifierModel):
    """Labelled prototypes; the distribution is the normalized inverse distance to each class."""

    kind: Literal["lvq"] = "lvq"

    prototypes: list[list[float]]
    """The prototype vectors."""

    prototype_classes: list[int]
    """The class index of each prototype."""

    def _proba(self, X: np.ndarray) -> np.ndarray:
        prototypes = np.asarray(self.prototypes)
        owners = np.asarray(self.prototype_classes)
        distances = np.sqrt(((X[:, None, :] - prototypes[None, :, :]) ** 2).sum(axis=2))
        nearest = np.stack([distances[:, owners == c].min(axis=1) for c in range(len(self.class_set))], axis=1)
        return 1.0 / (nearest + DISTANCE_EPSILON)


def fit_lvq(
    X: np.ndarray,
    codes: np.ndarray,
    class_set: list[str],
    prototypes_per_class: int = 4,
    learning_rate: float = 0.3,
    epochs: int = 1000,
    seed: int = 0,
) -> LVQModel:
    """Train LVQ1 prototypes.

    Prototypes start as seeded draws from their class (with replacement when the class is
    smaller than `prototypes_per_class`). Each epoch visits the samples in a seeded order
    and pulls the nearest prototype toward a same-class sample or pushes it away otherwise.
    The rate decays linearly from `learning_rate` to 0 over the epochs.
    """
    rng = derive_rng(seed)
    chosen, owners = [], []
    for code in range(len(class_set)):
        members = np.flatnonzero(codes == code)
        picks = rng.choice(members, size=prototypes_per_class, replace=members.size < prototypes_per_class)
        chosen.extend(picks.tolist())
        owners.extend([code] * prototypes_per_class)
    prototypes = X[chosen].copy()
    owner_codes = np.asarray(owners)

    for epoch in range(epochs):
        rate = learning_rate * (1.0 - epoch / epochs)
        if rate <= 0:
            break
        for s in rng.permutation(X.shape[0]):
            winner = int(np.argmin(((prototypes - X[s]) ** 2).sum(axis=1)))
            delta = rate * (X[s] - prototypes[winner])
            prototypes[winner] += delta if owner_codes[winner] == codes[s] else -delta

    return LVQModel(
        class_set=class_set, n_features=X.shape[1], prototypes=prototypes.tolist(), prototype_classes=owners
    )
