"""Linear soft-margin SVM trained by SMO, combined one-vs-one for multiclass."""

from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from app.exception import ConvergenceError
from app.libs.learners.base import ClassifierModel

# alphas within this fraction of C from a bound are snapped onto it
BOUND_SNAP = 1e-12


class SMOSolution(BaseModel):
    """The dual solution of one binary machine."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    alpha: np.ndarray
    """The Lagrange multipliers, in [0, C]."""

    bias: float
    """The intercept b of f(x) = w.x + b."""

    iterations: int
    """The number of pair updates."""

    kkt_gap: float
    """The maximal KKT violation at termination."""

    objective_trace: list[float] = Field(default_factory=list)
    """The dual objective after each update, when recorded."""


def dual_objective(alpha: np.ndarray, y: np.ndarray, K: np.ndarray) -> float:
    """W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def _working_sets(alpha: np.ndarray, y: np.ndarray, C: float) -> tuple[np.ndarray, np.ndarray]:
    positive = y > 0
    up = np.where(positive, alpha < C, alpha > 0)
    low = np.where(positive, alpha > 0, alpha < C)
    return up, low


def kkt_violation(alpha: np.ndarray, y: np.ndarray, K: np.ndarray, C: float) -> float:
    """The maximal violating-pair gap max_{I_up} -y_i g_i - min_{I_low} -y_j g_j, at least 0."""
    yg = y * (1.0 - y * (K @ (alpha * y)))
    up, low = _working_sets(alpha, y, C)
    if not up.any() or not low.any():
        return 0.0
    return max(0.0, float(yg[up].max() - yg[low].min()))


def smo_solve(
    K: np.ndarray,
    y: np.ndarray,
    C: float = 1.0,
    tolerance: float = 1e-3,
    max_iter: int = 100_000,
    record_objective: bool = False,
) -> SMOSolution:
    """Solve the soft-margin dual by sequential minimal optimization.

    Each step picks the maximal violating pair (i in I_up maximizing y_i g_i, j in I_low
    minimizing it) and moves both multipliers analytically along y_i a_i + y_j a_j = const.

    Args:
        K (np.ndarray): The Gram matrix, shape (n, n).
        y (np.ndarray): The targets in {-1, +1}.
        C (float): The soft-margin penalty.
        tolerance (float): Stop once the maximal violation is at most this.
        max_iter (int): The update budget.
        record_objective (bool): Whether to trace the dual objective.

    Returns:
        SMOSolution: The multipliers, intercept and diagnostics.

    Raises:
        ConvergenceError: When the budget runs out before the KKT conditions hold.
    """
    n = y.size
    alpha = np.zeros(n)
    # g_k = 1 - y_k f(x_k) without bias; y_k g_k = y_k - sum_j alpha_j y_j K_jk
    g = np.ones(n)
    trace: list[float] = []
    snap = BOUND_SNAP * C
    iterations = 0

    while True:
        yg = y * g
        up, low = _working_sets(alpha, y, C)
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(low, yg, np.inf)))
        gap = float(yg[i] - yg[j])
        if gap <= tolerance:
            break
        if iterations >= max_iter:
            raise ConvergenceError(f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3g})")

        upper_i = C - alpha[i] if y[i] > 0 else alpha[i]
        upper_j = alpha[j] if y[j] > 0 else C - alpha[j]
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        step = min(upper_i, upper_j)
        if eta > 0:
            step = min(step, gap / eta)

        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for k in (i, j):
            if alpha[k] < snap:
                alpha[k] = 0.0
            elif alpha[k] > C - snap:
                alpha[k] = C
        g += step * y * (K[j] - K[i])
        iterations += 1
        if record_objective:
            trace.append(dual_objective(alpha, y, K))

    yg = y * g
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(yg[free].mean())
    else:
        up, low = _working_sets(alpha, y, C)
        bounds = [float(yg[up].max())] if up.any() else []
        bounds += [float(yg[low].min())] if low.any() else []
        bias = float(np.mean(bounds)) if bounds else 0.0
    return SMOSolution(alpha=alpha, bias=bias, iterations=iterations, kkt_gap=gap, objective_trace=trace)


class PairwiseMachine(BaseModel):
    """A binary linear machine; positive decisions vote for `class_a`."""

    class_a: str
    class_b: str
    weights: list[float]
    bias: float

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Compute the signed decision values.

        Args:
            X (np.ndarray): The samples, shape (n, features), in training feature order.

        Returns:
            np.ndarray: `X @ w + b` per sample; values >= 0 vote for `class_a`.
        """
        return X @ np.asarray(self.weights) + self.bias


class LinearSVMModel(ClassifierModel):
    """One-vs-one linear SVMs; the distribution is the vote fraction of each class."""

    kind: Literal["linear_svm"] = "linear_svm"

    C: float
    """The soft-margin penalty used in training."""

    machines: list[PairwiseMachine]
    """One machine per class pair, in class-set order."""

    def _proba(self, X: np.ndarray) -> np.ndarray:
        index = {label: i for i, label in enumerate(self.class_set)}
        votes = np.zeros((X.shape[0], len(self.class_set)))
        for machine in self.machines:
            # a zero decision votes for the first class of the pair
            first = machine.decision(X) >= 0
            votes[first, index[machine.class_a]] += 1
            votes[~first, index[machine.class_b]] += 1
        return votes / max(1, len(self.machines))


def fit_linear_svm(
    X: np.ndarray,
    codes: np.ndarray,
    class_set: list[str],
    C: float = 1.0,
    tolerance: float = 1e-3,
    max_iter: int = 100_000,
) -> LinearSVMModel:
    """Train one machine per class pair with a linear kernel."""
    machines = []
    for a in range(len(class_set)):
        for b in range(a + 1, len(class_set)):
            mask = (codes == a) | (codes == b)
            pair_X = X[mask]
            y = np.where(codes[mask] == a, 1.0, -1.0)
            solution = smo_solve(pair_X @ pair_X.T, y, C=C, tolerance=tolerance, max_iter=max_iter)
            weights = (solution.alpha * y) @ pair_X
            logger.debug(
                f"SVM {class_set[a]} vs {class_set[b]}: {solution.iterations} iterations, "
                f"{int((solution.alpha > 0).sum())} support vectors"
            )
            machines.append(
                PairwiseMachine(
                    class_a=class_set[a], class_b=class_set[b], weights=weights.tolist(), bias=solution.bias
                )
            )
    return LinearSVMModel(class_set=class_set, n_features=X.shape[1], C=C, machines=machines)
