"""Preprocess Step.

This step filters, cleans and standardizes the expression matrix.
"""

import asyncio

from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError
from app.libs.corpus import write_table
from app.libs.preprocess import run_preprocessing
from app.steps.common import ensure_dataset, step_failure
from app.types import PipelineState, Step, StepResult


class PreprocessStep(Step):
    """Preprocess Step."""

    name: str = "preprocess"
    """The name of the step."""

    description: str = "Filter by present calls and noise floor, impute outliers, log-transform and z-score."
    """The description of the step."""

    async def execute(self, state: PipelineState, config: RunConfig) -> StepResult:
        """Execute the step.

        Args:
            state (PipelineState): The current state.
            config (RunConfig): The run configuration.

        Returns:
            StepResult: The result of the step execution.
        """
        try:
            state = ensure_dataset(state, config, default_stage="raw")
            result = await asyncio.to_thread(
                run_preprocessing, state.dataset, state.calls, config.preprocess_options()
            )
            state.add_artifact(write_table(result.dataset, state.out_dir / "preprocessed.tsv"))
            state.add_artifact(write_table(result.filter_report, state.out_dir / "filter_report.tsv"))
            state.add_artifact(write_table(result.outliers, state.out_dir / "outliers.tsv", kind="outliers"))
            state.add_artifact(write_table(result.transform_summary, state.out_dir / "transform_summary.tsv"))
        except (BiomarkerError, ValidationError) as e:
            return step_failure(state, e)

        report = result.filter_report
        return StepResult(
            is_error=False,
            message=f"kept {report.output_count} of {report.input_count} probesets, "
            f"{len(result.outliers)} outliers flagged",
            updated_state=state.model_copy(update={"dataset": result.dataset, "calls": None}),
        )
