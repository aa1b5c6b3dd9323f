import numpy as np
import pytest
from loguru import logger

from app.types import ExpressionMatrix, LabeledDataset, Stage


@pytest.fixture(autouse=True)
def quiet_logger():
    logger.remove()
    yield
    logger.remove()


def make_dataset(
    values: np.ndarray,
    labels: list[str],
    stage: Stage = "zscore",
    probeset_ids: list[str] | None = None,
) -> LabeledDataset:
    """Build a dataset from a probesets x samples array; sample IDs are <label>_<n>."""
    values = np.asarray(values, dtype=float)
    probeset_ids = probeset_ids or [f"f{i:03d}" for i in range(values.shape[0])]
    sample_ids = [f"{label}_{j + 1:02d}" for j, label in enumerate(labels)]
    matrix = ExpressionMatrix(probeset_ids=probeset_ids, sample_ids=sample_ids, values=values, stage=stage)
    return LabeledDataset.from_labels(matrix, list(labels))


@pytest.fixture
def build_dataset():
    return make_dataset


@pytest.fixture
def three_class_labels() -> list[str]:
    return ["HC"] * 10 + ["ND"] * 10 + ["PD"] * 10


@pytest.fixture
def separable_dataset(three_class_labels) -> LabeledDataset:
    """One feature that encodes the class, one alternating feature with equal class means and one constant."""
    codes = np.repeat([0, 1, 2], 10)
    informative = codes * 5.0
    noise = np.tile([-1.0, 1.0], 15)
    constant = np.zeros(codes.size)
    return make_dataset(
        np.vstack([informative, noise, constant]),
        three_class_labels,
        probeset_ids=["a_marker", "b_noise", "c_flat"],
    )
