from app.libs.learners.base import ClassifierConfig, ClassifierModel
from app.libs.learners.decision_table import DecisionTableModel
from app.libs.learners.lvq import LVQModel
from app.libs.learners.naive_bayes import NaiveBayesModel
from app.libs.learners.svm import LinearSVMModel, PairwiseMachine, SMOSolution, dual_objective, kkt_violation, smo_solve
from app.libs.learners.trainer import fit, load_model, predict, predict_proba, save_model, svm_weights

__all__ = [
    "ClassifierConfig",
    "ClassifierModel",
    "DecisionTableModel",
    "LVQModel",
    "LinearSVMModel",
    "NaiveBayesModel",
    "PairwiseMachine",
    "SMOSolution",
    "dual_objective",
    "fit",
    "kkt_violation",
    "load_model",
    "predict",
    "predict_proba",
    "save_model",
    "smo_solve",
    "svm_weights",
]
