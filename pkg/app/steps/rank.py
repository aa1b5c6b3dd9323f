"""Rank Step.

This step ranks the probesets by differential expression.
"""

import asyncio

from pydantic import ValidationError

from app.config import RunConfig
from app.exception import BiomarkerError
from app.libs.corpus import write_table
from app.libs.diffexpr import heatmap_export, rank_genes, significant_genes
from app.steps.common import ensure_dataset, step_failure
from app.types import PipelineState, Step, StepResult


class RankStep(Step):
    """Rank Step."""

    name: str = "rank"
    """The name of the step."""

    description: str = "Score every probeset, adjust for multiple testing and export the heatmap matrix."
    """The description of the step."""

    async def execute(self, state: PipelineState, config: RunConfig) -> StepResult:
        """Execute the step.

        Args:
            state (PipelineState): The current state.
            config (RunConfig): The run configuration.

        Returns:
            StepResult: The result of the step execution; the message holds the significant count.
        """
        try:
            state = ensure_dataset(state, config, default_stage="zscore")
            scores = await asyncio.to_thread(
                rank_genes,
                state.dataset,
                config.statistic,
                config.permutation_plan(),
                config.pvalue_mode,
                config.workers,
            )
            significant = significant_genes(scores, config.fdr_cutoff)
            heatmap = heatmap_export(state.dataset, scores, min(config.heatmap_top, len(scores)))
            state.add_artifact(write_table(scores, state.out_dir / "scores.tsv", kind="scores"))
            state.add_artifact(write_table(heatmap, state.out_dir / "heatmap.tsv"))
        except (BiomarkerError, ValidationError) as e:
            return step_failure(state, e)

        return StepResult(
            is_error=False,
            message=f"significant genes (fdr < {config.fdr_cutoff:g}): {len(significant)}",
            updated_state=state.model_copy(update={"scores": scores}),
        )
