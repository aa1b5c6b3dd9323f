"""Select Step.

This step runs a multivariate feature selector on the whole dataset.
"""

import asyncio

from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError
from app.libs.corpus import write_table
from app.libs.featsel import run_selector
from app.steps.common import ensure_dataset, step_failure
from app.types import PipelineState, Step, StepResult


class SelectStep(Step):
    """Select Step."""

    name: str = "select"
    """The name of the step."""

    description: str = "Select a feature subset with wrapper, CFS or recursive SVM elimination."
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
            selection = await asyncio.to_thread(run_selector, config.selector_config(), state.dataset)
            state.add_artifact(write_table(selection.subset, state.out_dir / "subset.tsv"))
            if selection.ranking is not None:
                state.add_artifact(write_table(selection.ranking, state.out_dir / "ranking.tsv"))
        except (BiomarkerError, ValidationError) as e:
            return step_failure(state, e)

        return StepResult(
            is_error=False,
            message=f"{config.selector} selected {len(selection.subset.feature_ids)} features "
            f"(score {selection.subset.score:.4f})",
            updated_state=state.model_copy(update={"subset": selection.subset, "ranking": selection.ranking}),
        )
