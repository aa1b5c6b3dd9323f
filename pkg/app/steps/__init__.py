"""Pipeline steps.

Each step implements one CLI subcommand.
"""

from app.steps.evaluate import EvaluateStep
from app.steps.preprocess import PreprocessStep
from app.steps.rank import RankStep
from app.steps.select import SelectStep
from app.steps.simulate import SimulateStep

__all__ = [
    "EvaluateStep",
    "PreprocessStep",
    "RankStep",
    "SelectStep",
    "SimulateStep",
]
