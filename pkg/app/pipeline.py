"""Biomarker discovery pipeline.

This module runs one subcommand, or the whole chain, as a sequence of steps sharing
a pipeline state.
"""

from typing import Literal

from loguru import logger
from pydantic import BaseModel

from app.config import RunConfig
from app.steps import EvaluateStep, PreprocessStep, RankStep, SelectStep, SimulateStep
from app.types import PipelineState, Step

Subcommand = Literal["preprocess", "rank", "select", "evaluate", "simulate", "pipeline"]
SUBCOMMANDS: tuple[Subcommand, ...] = ("preprocess", "rank", "select", "evaluate", "simulate", "pipeline")


class RunOutcome(BaseModel):
    """The outcome of a run."""

    exit_code: int
    """0 on success, otherwise the exit status of the failure."""

    error_code: str | None = None
    """The machine-parsable code of the failure."""

    messages: list[str]
    """One summary line per executed step."""

    state: PipelineState
    """The final state, including the written artifacts."""


class BiomarkerPipeline:
    """Biomarker discovery pipeline.

    Chains the steps of a subcommand and stops at the first failing one.
    """

    def __init__(self, steps: list[Step] | None = None):
        """Initialize the pipeline.

        Args:
            steps (list[Step] | None): The available steps. Defaults to one per subcommand.
        """
        self.steps = steps or [SimulateStep(), PreprocessStep(), RankStep(), SelectStep(), EvaluateStep()]
        self._steps_by_name = {step.name: step for step in self.steps}

    def _plan(self, subcommand: Subcommand, config: RunConfig) -> list[Step]:
        """Get the steps of a subcommand.

        `pipeline` simulates its input when no expression table is configured.
        """
        if subcommand != "pipeline":
            return [self._steps_by_name[subcommand]]
        names = ["preprocess", "rank", "select", "evaluate"]
        if config.input is None:
            names.insert(0, "simulate")
        return [self._steps_by_name[name] for name in names]

    async def _run(self, subcommand: Subcommand, config: RunConfig) -> RunOutcome:
        """Run the steps of a subcommand.

        Args:
            subcommand (Subcommand): The subcommand.
            config (RunConfig): The materialized configuration.

        Returns:
            RunOutcome: The outcome.
        """
        state = PipelineState(out_dir=config.out_dir)
        state.add_artifact(config.write_echo(config.out_dir))
        messages: list[str] = []

        for step in self._plan(subcommand, config):
            logger.info(f"Running step {step.name}")
            result = await step.execute(state, config=config)
            state = result.updated_state
            messages.append(result.message)
            if result.is_error:
                return RunOutcome(exit_code=result.exit_code, error_code=result.error_code, messages=messages, state=state)
            logger.info(f"Step {step.name}: {result.message}")

        return RunOutcome(exit_code=0, messages=messages, state=state)

    async def run(self, subcommand: Subcommand, config: RunConfig) -> RunOutcome:
        """Run a subcommand with every seed materialized and echoed first.

        Args:
            subcommand (Subcommand): The subcommand.
            config (RunConfig): The configuration.

        Returns:
            RunOutcome: The outcome.
        """
        config = config.materialized()
        with logger.contextualize(subcommand=subcommand):
            return await self._run(subcommand, config)
