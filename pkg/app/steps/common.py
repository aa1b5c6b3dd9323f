"""Helpers shared by the pipeline steps."""

from loguru import logger
from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError, InvalidParameterError
from app.libs.corpus import label_dataset, parse_call_table, parse_expression_table, parse_label_table, read_text
from app.types import CallMatrix, LabeledDataset, PipelineState, Stage, StepResult


def step_failure(state: PipelineState, error: BiomarkerError | ValidationError) -> StepResult:
    """Turn an error into a failed step result."""
    if isinstance(error, ValidationError):
        detail = error.errors()[0]
        error = InvalidParameterError(f"{'.'.join(str(p) for p in detail['loc'])}: {detail['msg']}")
    logger.error(str(error))
    return StepResult(
        is_error=True,
        message=str(error),
        error_code=error.code,
        exit_code=error.exit_code,
        updated_state=state,
    )


def load_inputs(config: RunConfig, default_stage: Stage) -> tuple[LabeledDataset, CallMatrix | None]:
    """Read the expression table, optional calls and labels named by the configuration.

    Raises:
        InvalidParameterError: When no input is configured.
    """
    if config.input is None:
        raise InvalidParameterError("an expression table is required (--input)")
    stage = config.input_stage or default_stage
    matrix = parse_expression_table(read_text(config.input), stage=stage)
    calls = parse_call_table(read_text(config.calls), companion=matrix) if config.calls else None
    label_map = parse_label_table(read_text(config.labels)) if config.labels else None
    dataset = label_dataset(matrix, label_map)
    logger.info(
        f"Loaded {matrix.n_probesets} probesets x {matrix.n_samples} samples ({stage}), "
        f"classes {dataset.class_counts()}"
    )
    return dataset, calls


def ensure_dataset(state: PipelineState, config: RunConfig, default_stage: Stage) -> PipelineState:
    """Load the inputs unless an earlier step already produced a dataset."""
    if state.dataset is not None:
        return state
    dataset, calls = load_inputs(config, default_stage)
    return state.model_copy(update={"dataset": dataset, "calls": calls})
