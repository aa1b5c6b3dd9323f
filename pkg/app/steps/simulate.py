"""Simulate Step.

This step generates a synthetic dataset with known ground truth.
"""

import asyncio

from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError
from app.libs.corpus import write_table
from app.libs.synthgen import generate, write_truth
from app.steps.common import step_failure
from app.types import PipelineState, Step, StepResult


class SimulateStep(Step):
    """Simulate Step."""

    name: str = "simulate"
    """The name of the step."""

    description: str = "Generate a synthetic expression table, its calls and a truth record."
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
            spec = config.synth_spec()
            dataset, calls, truth = await asyncio.to_thread(generate, spec)
            state.add_artifact(write_table(dataset, state.out_dir / "expression.tsv"))
            state.add_artifact(write_table(calls, state.out_dir / "calls.tsv"))
            truth_path = state.out_dir / "truth.json"
            truth_path.write_text(write_truth(truth), encoding="utf-8")
            state.add_artifact(truth_path)
        except (BiomarkerError, ValidationError) as e:
            return step_failure(state, e)

        return StepResult(
            is_error=False,
            message=f"simulated {spec.genes} genes x {len(dataset.labels)} samples, "
            f"{len(truth.informative_ids)} planted, {len(truth.outliers)} outliers",
            updated_state=state.model_copy(update={"dataset": dataset, "calls": calls}),
        )
