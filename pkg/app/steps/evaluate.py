"""Evaluate Step.

This step cross-validates a selector and classifier with selection inside each fold.
"""

import asyncio

from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError
from app.libs.corpus import write_table
from app.libs.evaluate import nested_cv, stratified_folds
from app.steps.common import ensure_dataset, step_failure
from app.types import PipelineState, Step, StepResult


class EvaluateStep(Step):
    """Evaluate Step."""

    name: str = "evaluate"
    """The name of the step."""

    description: str = "Run stratified nested cross-validation and report the pooled metrics."
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
            state = ensure_dataset(state, config, default_stage="zscore")
            plan = stratified_folds(state.dataset.labels, k=config.folds, seed=config.fold_seed)
            report = await asyncio.to_thread(
                nested_cv,
                state.dataset,
                config.selector_config(),
                config.classifier_config(),
                plan,
                config.workers,
                config.continue_on_failure,
            )
            state.add_artifact(write_table(report, state.out_dir / "report.txt"))
            json_path = state.out_dir / "report.json"
            json_path.write_text(report.to_json(), encoding="utf-8")
            state.add_artifact(json_path)
        except (BiomarkerError, ValidationError) as e:
            return step_failure(state, e)

        kappa = "undefined" if report.kappa is None else f"{report.kappa:.4f}"
        return StepResult(
            is_error=False,
            message=f"accuracy {report.accuracy:.4f}, kappa {kappa} over {report.n_instances} instances",
            updated_state=state.model_copy(update={"report": report}),
        )
