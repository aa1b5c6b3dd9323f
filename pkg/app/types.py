"""Types for the biomarker discovery toolkit.

This module contains the data types shared by the library modules, the pipeline
steps and the CLI.
"""

import json
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        """Backport of ``enum.StrEnum``."""

        __str__ = str.__str__
        __format__ = str.__format__
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from app.exception import DataValidationError
from app.utils import find_duplicates

if TYPE_CHECKING:
    from app.config import RunConfig

Stage = Literal["raw", "log", "zscore"]
StatisticKind = Literal["t", "snr", "f"]
PValueMode = Literal["permutation", "parametric"]
ClassifierKind = Literal["naive_bayes", "linear_svm", "lvq", "decision_table"]
SelectorKind = Literal["wse", "cfs", "rsvm"]
SearchKind = Literal["greedy", "bestfirst", "ranker"]

DEFAULT_CLASS_PREFIXES = ("HC", "ND", "PD")


def _frozen_array(value: Any, dtype: Any, shape: tuple[int, int] | None = None) -> np.ndarray:
    array = np.array(value, dtype=dtype, copy=True)
    if array.size == 0 and shape is not None:
        array = array.reshape(shape)
    array.setflags(write=False)
    return array


class DetectionCall(StrEnum):
    """A MAS5 detection call."""

    PRESENT = "P"
    MARGINAL = "M"
    ABSENT = "A"


class ExpressionMatrix(BaseModel):
    """Probesets × samples expression values with aligned identifiers."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probeset_ids: list[str]
    """The probeset identifiers, one per row."""

    sample_ids: list[str]
    """The sample identifiers, one per column."""

    values: np.ndarray
    """The expression values, shape (probesets, samples)."""

    stage: Stage = "raw"
    """The transforms applied so far."""

    @field_validator("values", mode="before")
    @classmethod
    def _freeze_values(cls, value: Any, info: ValidationInfo) -> np.ndarray:
        shape = (len(info.data.get("probeset_ids", [])), len(info.data.get("sample_ids", [])))
        return _frozen_array(value, float, shape)

    @model_validator(mode="after")
    def _check_invariants(self) -> "ExpressionMatrix":
        expected = (len(self.probeset_ids), len(self.sample_ids))
        if self.values.shape != expected:
            raise DataValidationError(f"values have shape {self.values.shape}, identifiers describe {expected}")
        if duplicates := find_duplicates(self.probeset_ids):
            raise DataValidationError(f"duplicate probeset ids: {', '.join(duplicates)}")
        if duplicates := find_duplicates(self.sample_ids):
            raise DataValidationError(f"duplicate sample ids: {', '.join(duplicates)}")
        if not np.all(np.isfinite(self.values)):
            raise DataValidationError("expression values must be finite")
        if self.stage == "raw" and np.any(self.values < 0):
            raise DataValidationError("raw expression values must be nonnegative")
        return self

    @property
    def n_probesets(self) -> int:
        """The number of rows."""
        return len(self.probeset_ids)

    @property
    def n_samples(self) -> int:
        """The number of columns."""
        return len(self.sample_ids)

    def row_positions(self, probeset_ids: list[str]) -> list[int]:
        """Get the row index of each probeset.

        Args:
            probeset_ids (list[str]): The probesets to look up.

        Returns:
            list[int]: The row indices.

        Raises:
            DataValidationError: If a probeset is not in the matrix.
        """
        index = {probeset_id: i for i, probeset_id in enumerate(self.probeset_ids)}
        missing = [probeset_id for probeset_id in probeset_ids if probeset_id not in index]
        if missing:
            raise DataValidationError(f"unknown probeset ids: {', '.join(missing[:10])}")
        return [index[probeset_id] for probeset_id in probeset_ids]

    def take_rows(self, rows: list[int] | np.ndarray) -> "ExpressionMatrix":
        """Keep only the given rows, in the given order."""
        rows = np.asarray(rows, dtype=int)
        return ExpressionMatrix(
            probeset_ids=[self.probeset_ids[i] for i in rows],
            sample_ids=self.sample_ids,
            values=self.values[rows, :],
            stage=self.stage,
        )

    def take_columns(self, columns: list[int] | np.ndarray) -> "ExpressionMatrix":
        """Keep only the given columns, in the given order."""
        columns = np.asarray(columns, dtype=int)
        return ExpressionMatrix(
            probeset_ids=self.probeset_ids,
            sample_ids=[self.sample_ids[i] for i in columns],
            values=self.values[:, columns],
            stage=self.stage,
        )

    def with_values(self, values: np.ndarray, stage: Stage | None = None) -> "ExpressionMatrix":
        """Return a copy carrying new values and, optionally, a new stage."""
        return ExpressionMatrix(
            probeset_ids=self.probeset_ids,
            sample_ids=self.sample_ids,
            values=values,
            stage=stage or self.stage,
        )


class CallMatrix(BaseModel):
    """Detection calls aligned with an expression matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probeset_ids: list[str]
    """The probeset identifiers, one per row."""

    sample_ids: list[str]
    """The sample identifiers, one per column."""

    calls: np.ndarray
    """The calls as single letters P/M/A, shape (probesets, samples)."""

    @field_validator("calls", mode="before")
    @classmethod
    def _freeze_calls(cls, value: Any, info: ValidationInfo) -> np.ndarray:
        shape = (len(info.data.get("probeset_ids", [])), len(info.data.get("sample_ids", [])))
        return _frozen_array(value, "<U1", shape)

    @model_validator(mode="after")
    def _check_invariants(self) -> "CallMatrix":
        expected = (len(self.probeset_ids), len(self.sample_ids))
        if self.calls.shape != expected:
            raise DataValidationError(f"calls have shape {self.calls.shape}, identifiers describe {expected}")
        unknown = set(np.unique(self.calls).tolist()) - {call.value for call in DetectionCall}
        if unknown:
            raise DataValidationError(f"unknown call symbols: {', '.join(sorted(unknown))}")
        return self

    def call(self, row: int, column: int) -> DetectionCall:
        """Get the call of one cell."""
        return DetectionCall(str(self.calls[row, column]))

    def present_mask(self) -> np.ndarray:
        """Get a boolean matrix that is true where the call is Present."""
        return self.calls == DetectionCall.PRESENT.value

    def check_aligned(self, matrix: ExpressionMatrix):
        """Check that the calls describe the same cells as the matrix.

        Args:
            matrix (ExpressionMatrix): The companion matrix.

        Raises:
            DataValidationError: If dimensions or identifiers differ.
        """
        if self.calls.shape != matrix.values.shape:
            raise DataValidationError(
                f"call matrix is {self.calls.shape[0]}x{self.calls.shape[1]}, "
                f"expression matrix is {matrix.n_probesets}x{matrix.n_samples}"
            )
        if self.probeset_ids != matrix.probeset_ids or self.sample_ids != matrix.sample_ids:
            raise DataValidationError("call matrix identifiers do not match the expression matrix")

    def take_rows(self, rows: list[int] | np.ndarray) -> "CallMatrix":
        """Keep only the given rows, in the given order."""
        rows = np.asarray(rows, dtype=int)
        return CallMatrix(
            probeset_ids=[self.probeset_ids[i] for i in rows],
            sample_ids=self.sample_ids,
            calls=self.calls[rows, :],
        )


class LabeledDataset(BaseModel):
    """An expression matrix with one class label per sample."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: ExpressionMatrix
    """The expression matrix."""

    labels: list[str]
    """The class label of each sample, aligned with the matrix columns."""

    class_set: list[str]
    """The distinct labels in first-appearance order."""

    @model_validator(mode="after")
    def _check_invariants(self) -> "LabeledDataset":
        if len(self.labels) != self.matrix.n_samples:
            raise DataValidationError(f"{len(self.labels)} labels for {self.matrix.n_samples} samples")
        if duplicates := find_duplicates(self.class_set):
            raise DataValidationError(f"duplicate classes: {', '.join(duplicates)}")
        unknown = sorted(set(self.labels) - set(self.class_set))
        if unknown:
            raise DataValidationError(f"labels not in class set: {', '.join(unknown)}")
        return self

    @classmethod
    def from_labels(cls, matrix: ExpressionMatrix, labels: list[str]) -> "LabeledDataset":
        """Build a dataset whose class set is the labels in first-appearance order."""
        return cls(matrix=matrix, labels=labels, class_set=list(dict.fromkeys(labels)))

    @property
    def class_codes(self) -> np.ndarray:
        """The index of each sample's label in `class_set`."""
        index = {label: i for i, label in enumerate(self.class_set)}
        return np.array([index[label] for label in self.labels], dtype=int)

    def class_counts(self) -> dict[str, int]:
        """Count the samples of each class, in `class_set` order."""
        codes = self.class_codes
        return {label: int(np.sum(codes == i)) for i, label in enumerate(self.class_set)}

    def require_classes(self, minimum: int = 2):
        """Raise if fewer than `minimum` classes are populated."""
        populated = [label for label, count in self.class_counts().items() if count > 0]
        if len(populated) < minimum:
            raise DataValidationError(f"analysis needs at least {minimum} classes, found {len(populated)}")

    def features(self, probeset_ids: list[str] | None = None) -> np.ndarray:
        """Get the samples × features design matrix.

        Args:
            probeset_ids (list[str] | None): The features to keep. Defaults to every probeset.

        Returns:
            np.ndarray: The design matrix, shape (samples, features).
        """
        if probeset_ids is None:
            return np.asarray(self.matrix.values.T)
        return np.asarray(self.matrix.values[self.matrix.row_positions(probeset_ids), :].T)

    def take_samples(self, columns: list[int] | np.ndarray) -> "LabeledDataset":
        """Keep only the given samples; the class set is preserved."""
        columns = np.asarray(columns, dtype=int)
        return LabeledDataset(
            matrix=self.matrix.take_columns(columns),
            labels=[self.labels[i] for i in columns],
            class_set=self.class_set,
        )

    def take_probesets(self, probeset_ids: list[str]) -> "LabeledDataset":
        """Keep only the given probesets, in the given order."""
        return self.with_matrix(self.matrix.take_rows(self.matrix.row_positions(probeset_ids)))

    def with_matrix(self, matrix: ExpressionMatrix) -> "LabeledDataset":
        """Return a copy carrying a new matrix with the same samples."""
        return LabeledDataset(matrix=matrix, labels=self.labels, class_set=self.class_set)


class FilterReport(BaseModel):
    """Bookkeeping of the probeset filters."""

    input_count: int
    """The number of probesets before filtering."""

    removed_by_calls: int = 0
    """The number removed by the present-call filter."""

    removed_by_noise: int = 0
    """The number removed by the noise-floor filter."""

    output_count: int
    """The number of probesets kept."""

    removed_ids: list[str] = Field(default_factory=list)
    """The removed probesets, in removal order."""

    @model_validator(mode="after")
    def _check_arithmetic(self) -> "FilterReport":
        if self.output_count != self.input_count - self.removed_by_calls - self.removed_by_noise:
            raise DataValidationError("filter report counts do not add up")
        return self

    def merge(self, later: "FilterReport") -> "FilterReport":
        """Combine this report with one from a filter applied afterwards."""
        return FilterReport(
            input_count=self.input_count,
            removed_by_calls=self.removed_by_calls + later.removed_by_calls,
            removed_by_noise=self.removed_by_noise + later.removed_by_noise,
            output_count=later.output_count,
            removed_ids=self.removed_ids + later.removed_ids,
        )


class DistributionBin(BaseModel):
    """One histogram bar of a sample's values."""

    scale: Literal["raw", "log"]
    """Whether the bar counts raw or log-transformed values."""

    lower: float
    """The left bin edge (inclusive)."""

    upper: float
    """The right bin edge; exclusive except for the last bin of a scale."""

    count: int
    """The number of probesets in the bin."""


class TransformSummary(BaseModel):
    """The distribution of one sample before and after the log transform, ready to plot."""

    sample_id: str
    """The summarized sample."""

    raw_skewness: float
    """The sample skewness of the raw values."""

    log_skewness: float
    """The sample skewness of the log-transformed values."""

    bins: list[DistributionBin]
    """The raw histogram followed by the log histogram."""


class OutlierRecord(BaseModel):
    """A value inconsistent with the other values of its class."""

    probeset_id: str
    """The probeset of the flagged cell."""

    sample_id: str
    """The sample of the flagged cell."""

    class_label: str
    """The class of the sample."""

    observed_value: float
    """The flagged value."""

    class_mean: float
    """The mean of the unflagged other class members on this probeset."""

    class_std: float
    """The sample standard deviation of the unflagged other class members on this probeset."""

    z: float
    """The standardized deviation of the flagged value."""


class GeneScore(BaseModel):
    """The univariate differential expression result of one probeset."""

    probeset_id: str
    """The probeset."""

    statistic: float
    """The observed test statistic (NaN when degenerate)."""

    raw_p: float
    """The unadjusted p-value."""

    fdr_bh: float
    """The Benjamini-Hochberg adjusted p-value."""

    fwer_bonferroni: float
    """The Bonferroni adjusted p-value."""

    fwer_hochberg: float
    """The Hochberg step-up adjusted p-value."""

    rank: int
    """The rank by raw p-value, 1 being the most significant."""

    degenerate: bool = False
    """Whether the statistic could not be computed."""

    top_class: str | None = None
    """The class with the largest mean expression."""


class PermutationPlan(BaseModel):
    """How many label permutations to draw and from which seed."""

    permutation_count: int = Field(default=1000, ge=1)
    """The number of permutation rounds."""

    seed: int = 0
    """The seed of the round shuffles."""


class SearchStep(BaseModel):
    """One accepted step of a subset search."""

    feature_id: str
    """The feature added at this step."""

    score: float
    """The subset score after the addition."""


class FeatureSubset(BaseModel):
    """A feature subset found by a search."""

    feature_ids: list[str]
    """The selected features in order of addition."""

    score: float
    """The evaluator value of the subset."""

    evaluator: Literal["cfs", "wrapper", "ranker"]
    """The evaluator that scored the subset."""

    trace: list[SearchStep] = Field(default_factory=list)
    """The accepted improvements in order."""

    @model_validator(mode="after")
    def _check_invariants(self) -> "FeatureSubset":
        if not self.feature_ids:
            raise DataValidationError("a feature subset cannot be empty")
        if duplicates := find_duplicates(self.feature_ids):
            raise DataValidationError(f"duplicate features in subset: {', '.join(duplicates)}")
        return self


class FeatureRanking(BaseModel):
    """Features ordered from most to least important."""

    feature_ids: list[str]
    """The features, most important first."""

    criteria: list[float]
    """The elimination criterion of each feature when it was last scored."""

    trainings: int = 0
    """The number of models trained to build the ranking."""


class FoldPlan(BaseModel):
    """A stratified assignment of samples to folds."""

    k: int
    """The number of folds."""

    assignment: list[int]
    """The fold index of each sample."""

    seed: int
    """The seed used for the per-class shuffles."""

    def test_indices(self, fold: int) -> np.ndarray:
        """The samples held out in a fold."""
        return np.flatnonzero(np.asarray(self.assignment) == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        """The samples used for training in a fold."""
        return np.flatnonzero(np.asarray(self.assignment) != fold)

    def fold_sizes(self) -> list[int]:
        """The number of samples in each fold."""
        return np.bincount(np.asarray(self.assignment, dtype=int), minlength=self.k).tolist()


class ConfusionMatrix(BaseModel):
    """Counts of true (rows) versus predicted (columns) classes."""

    class_set: list[str]
    """The class labels of rows and columns."""

    counts: list[list[int]]
    """The counts, `counts[true][predicted]`."""

    @model_validator(mode="after")
    def _check_invariants(self) -> "ConfusionMatrix":
        size = len(self.class_set)
        if len(self.counts) != size or any(len(row) != size for row in self.counts):
            raise DataValidationError("confusion matrix must be square over the class set")
        if any(count < 0 for row in self.counts for count in row):
            raise DataValidationError("confusion counts must be nonnegative")
        return self

    @property
    def array(self) -> np.ndarray:
        """The counts as an integer array."""
        return np.array(self.counts, dtype=int).reshape(len(self.class_set), len(self.class_set))

    @property
    def n_instances(self) -> int:
        """The number of evaluated instances."""
        return int(self.array.sum())


class FoldFailure(BaseModel):
    """A fold that could not be evaluated."""

    fold: int
    """The fold index."""

    reason: str
    """The error message."""


class EvalReport(BaseModel):
    """The pooled cross-validation result of one selector and classifier."""

    confusion: ConfusionMatrix
    """The pooled confusion matrix."""

    accuracy: float
    """The fraction of correctly classified instances."""

    kappa: float | None
    """Cohen's kappa, None when chance agreement is 1."""

    mae: float
    """The mean absolute error of the class distributions."""

    rmse: float
    """The root mean squared error of the class distributions."""

    rae: float
    """The relative absolute error, in percent of the prior predictor."""

    rrse: float
    """The root relative squared error, in percent of the prior predictor."""

    n_instances: int
    """The number of evaluated instances."""

    complete: bool = True
    """Whether every fold was evaluated."""

    failed_folds: list[FoldFailure] = Field(default_factory=list)
    """The folds that failed."""

    selected_features: list[list[str]] = Field(default_factory=list)
    """The features selected in each fold."""

    config: dict[str, Any] = Field(default_factory=dict)
    """Echo of the selector, classifier and seeds."""

    def to_text(self) -> str:
        """Render the report as a human readable block.

        Returns:
            str: Summary lines followed by the confusion matrix.
        """
        correct = int(np.trace(self.confusion.array))
        incorrect = self.n_instances - correct
        accuracy = 100.0 * self.accuracy
        kappa = "undefined" if self.kappa is None else f"{self.kappa:.4f}"
        lines = ["=== Stratified cross-validation ===", "=== Summary ==="]
        for key, value in sorted(self.config.items()):
            lines.append(f"# {key}: {value}")
        lines += [
            f"Correctly Classified Instances\t{correct}\t{accuracy:.4f} %",
            f"Incorrectly Classified Instances\t{incorrect}\t{100.0 - accuracy if self.n_instances else 0.0:.4f} %",
            f"Kappa statistic\t{kappa}",
            f"Mean absolute error\t{self.mae:.4f}",
            f"Root mean squared error\t{self.rmse:.4f}",
            f"Relative absolute error\t{self.rae:.4f} %",
            f"Root relative squared error\t{self.rrse:.4f} %",
            f"Total Number of Instances\t{self.n_instances}",
        ]
        if not self.complete:
            lines.append(f"Failed folds\t{', '.join(str(failure.fold) for failure in self.failed_folds)}")
        lines += ["", "=== Confusion Matrix ==="]
        letters = [chr(ord("a") + i) if i < 26 else f"c{i}" for i in range(len(self.confusion.class_set))]  # noqa: PLR2004
        lines.append("\t".join(letters) + "\t<-- classified as")
        for letter, label, row in zip(letters, self.confusion.class_set, self.confusion.counts, strict=True):
            lines.append("\t".join(str(count) for count in row) + f"\t{letter} = {label}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        """Render the report as a JSON document."""
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


class InformativeGene(BaseModel):
    """A planted differentially expressed gene."""

    index: int = Field(ge=0)
    """The row index of the gene."""

    shifts: list[float]
    """The per-class mean shift on the log scale, in within-gene standard deviations."""


class OutlierInjection(BaseModel):
    """An outlier planted by the generator."""

    probeset_id: str
    """The probeset of the perturbed cell."""

    sample_id: str
    """The sample of the perturbed cell."""

    sign: Literal[-1, 1]
    """The direction of the perturbation actually applied."""

    value: float
    """The value written to the cell."""


class SynthSpec(BaseModel):
    """The parameters of a synthetic microarray dataset."""

    genes: int = Field(default=2000, ge=1)
    """The number of probesets."""

    class_sizes: list[int] = Field(default_factory=lambda: [22, 33, 50])
    """The number of samples of each class."""

    class_names: list[str] | None = None
    """The class labels; HC/ND/PD for three classes, C1..Cn otherwise."""

    informative: list[InformativeGene] = Field(default_factory=list)
    """The planted differentially expressed genes."""

    log_mean_range: tuple[float, float] = (5.0, 10.0)
    """The range of the per-gene base-2 log mean."""

    log_std_range: tuple[float, float] = (0.5, 1.5)
    """The range of the per-gene base-2 log standard deviation."""

    present_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    """The probability that a cell is called Present."""

    outlier_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    """The probability that a cell is replaced by an outlier."""

    outlier_magnitude: float = Field(default=6.0, ge=0.0)
    """The outlier distance from its class mean, in raw-scale class standard deviations."""

    seed: int = 0
    """The generator seed."""

    @model_validator(mode="after")
    def _check_feasible(self) -> "SynthSpec":
        if any(size < 2 for size in self.class_sizes):  # noqa: PLR2004
            raise DataValidationError("every class needs at least 2 samples")
        if len(self.class_sizes) < 2:  # noqa: PLR2004
            raise DataValidationError("a synthetic dataset needs at least 2 classes")
        if self.class_names is not None and len(self.class_names) != len(self.class_sizes):
            raise DataValidationError("class_names must match class_sizes")
        for gene in self.informative:
            if gene.index >= self.genes:
                raise DataValidationError(f"informative index {gene.index} exceeds gene count {self.genes}")
            if len(gene.shifts) != len(self.class_sizes):
                raise DataValidationError(f"informative gene {gene.index} needs one shift per class")
        for low, high in (self.log_mean_range, self.log_std_range):
            if low > high:
                raise DataValidationError("ranges must be ordered (low, high)")
        if self.log_std_range[0] <= 0:
            raise DataValidationError("log standard deviations must be positive")
        return self

    @property
    def labels(self) -> list[str]:
        """The class labels in order."""
        if self.class_names is not None:
            return self.class_names
        if len(self.class_sizes) == len(DEFAULT_CLASS_PREFIXES):
            return list(DEFAULT_CLASS_PREFIXES)
        return [f"C{i + 1}" for i in range(len(self.class_sizes))]


class TruthRecord(BaseModel):
    """The ground truth of a synthetic dataset."""

    spec: SynthSpec
    """The generating parameters."""

    informative_ids: list[str]
    """The probesets of the planted genes."""

    outliers: list[OutlierInjection] = Field(default_factory=list)
    """The injected outliers."""


class PipelineState(BaseModel):
    """Everything the pipeline steps have produced so far."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    out_dir: Path
    """Where artifacts are written."""

    dataset: LabeledDataset | None = None
    """The current dataset; replaced by the preprocessed one after `preprocess`."""

    calls: CallMatrix | None = None
    """The detection calls, if any."""

    scores: list[GeneScore] = Field(default_factory=list)
    """The univariate ranking."""

    subset: FeatureSubset | None = None
    """The selected features."""

    ranking: FeatureRanking | None = None
    """The recursive-elimination ranking, if any."""

    report: EvalReport | None = None
    """The nested cross-validation report."""

    artifacts: list[Path] = Field(default_factory=list)
    """The files written, in order."""

    def add_artifact(self, path: Path):
        """Record a written file."""
        if path not in self.artifacts:
            self.artifacts.append(path)


class StepResult(BaseModel):
    """The result of one pipeline step."""

    is_error: bool
    """Whether the step failed."""

    message: str
    """A one-line summary of what happened."""

    error_code: str | None = None
    """The machine-parsable code of the failure."""

    exit_code: int = 0
    """The exit status the failure maps to."""

    updated_state: PipelineState
    """The state after the step."""


class Step(BaseModel):
    """Base class for a pipeline step.

    Subclasses define `name`, `description` (the help text of their subcommand) and
    `execute`, which reads its options from the run configuration.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    """The subcommand name of the step."""

    description: str
    """What the step does, shown as the help of its subcommand."""

    async def execute(self, state: PipelineState, config: "RunConfig") -> StepResult:
        """Execute the step.

        Args:
            state (PipelineState): The current pipeline state.
            config (RunConfig): The materialized run configuration.

        Returns:
            StepResult: The result of the step.

        Raises:
            NotImplementedError: If the method is not implemented by the subclass.
        """
        raise NotImplementedError
