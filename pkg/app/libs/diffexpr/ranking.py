"""Gene ranking, significance selection and heatmap export."""

import numpy as np
from loguru import logger

from app.exception import InvalidParameterError
from app.libs.diffexpr.adjust import adjust_bh, adjust_bonferroni, adjust_hochberg
from app.libs.diffexpr.permutation import parametric_pvalues, permutation_pvalues
from app.libs.preprocess.transform import zscore
from app.types import GeneScore, LabeledDataset, PermutationPlan, PValueMode, StatisticKind

DEFAULT_FDR_CUTOFF = 0.01
DEFAULT_HEATMAP_TOP = 40


def rank_genes(
    dataset: LabeledDataset,
    statistic_kind: StatisticKind = "f",
    plan: PermutationPlan | None = None,
    pvalue_mode: PValueMode = "permutation",
    workers: int = 1,
) -> list[GeneScore]:
    """Rank every probeset by its differential expression p-value.

    Args:
        dataset (LabeledDataset): The preprocessed dataset.
        statistic_kind (StatisticKind): "t", "snr" or "f".
        plan (PermutationPlan | None): The permutation plan. Defaults to 1,000 rounds, seed 0.
        pvalue_mode (PValueMode): "permutation" or "parametric".
        workers (int): Threads for the permutation rounds.

    Returns:
        list[GeneScore]: One score per probeset, sorted by rank (raw p ascending, ties by probeset ID).
    """
    plan = plan or PermutationPlan()
    if pvalue_mode == "parametric":
        result = parametric_pvalues(dataset, statistic_kind)
    else:
        result = permutation_pvalues(dataset, statistic_kind, plan, workers=workers)

    ids = dataset.matrix.probeset_ids
    if not ids:
        return []
    fdr = adjust_bh(result.raw_p)
    bonferroni = adjust_bonferroni(result.raw_p)
    hochberg = adjust_hochberg(result.raw_p)

    codes = dataset.class_codes
    means = np.stack(
        [np.asarray(dataset.matrix.values)[:, codes == c].mean(axis=1) for c in range(len(dataset.class_set))], axis=1
    )
    top_class = means.argmax(axis=1)

    order = sorted(range(len(ids)), key=lambda i: (result.raw_p[i], ids[i]))
    scores = [
        GeneScore(
            probeset_id=ids[i],
            statistic=float(result.statistics[i]),
            raw_p=float(result.raw_p[i]),
            fdr_bh=float(fdr[i]),
            fwer_bonferroni=float(bonferroni[i]),
            fwer_hochberg=float(hochberg[i]),
            rank=rank,
            degenerate=bool(result.degenerate[i]),
            top_class=dataset.class_set[top_class[i]],
        )
        for rank, i in enumerate(order, start=1)
    ]
    logger.info(f"Ranked {len(scores)} probesets, {len(significant_genes(scores))} at FDR < {DEFAULT_FDR_CUTOFF}")
    return scores


def significant_genes(scores: list[GeneScore], fdr_cutoff: float = DEFAULT_FDR_CUTOFF) -> list[GeneScore]:
    """Keep the scores with a Benjamini-Hochberg FDR below the cutoff, in rank order."""
    return sorted((score for score in scores if score.fdr_bh < fdr_cutoff), key=lambda score: score.rank)


def heatmap_export(dataset: LabeledDataset, scores: list[GeneScore], top_n: int = DEFAULT_HEATMAP_TOP) -> LabeledDataset:
    """Build the heatmap matrix of the top genes by FDR.

    Rows are the `top_n` genes in rank order; columns are grouped into contiguous class
    blocks in `class_set` order, keeping the original order inside a block. Values are
    z-scored per row unless the dataset already is.

    Args:
        dataset (LabeledDataset): The dataset the scores were computed on.
        scores (list[GeneScore]): The ranking.
        top_n (int): The number of genes; clipped to the number of scores.

    Returns:
        LabeledDataset: The heatmap rows with their column labels.
    """
    if top_n < 0:
        raise InvalidParameterError(f"top_n must be nonnegative, got {top_n}")
    if top_n > len(scores):
        logger.warning(f"top_n={top_n} exceeds the {len(scores)} ranked genes, clipping")
        top_n = len(scores)

    chosen = sorted(scores, key=lambda score: (score.fdr_bh, score.rank))[:top_n]
    chosen.sort(key=lambda score: score.rank)
    matrix = dataset.matrix.take_rows(dataset.matrix.row_positions([score.probeset_id for score in chosen]))
    if matrix.stage != "zscore":
        matrix, _ = zscore(matrix)

    codes = dataset.class_codes
    columns = np.concatenate([np.flatnonzero(codes == c) for c in range(len(dataset.class_set))]).astype(int)
    return LabeledDataset(
        matrix=matrix.take_columns(columns),
        labels=[dataset.labels[i] for i in columns],
        class_set=dataset.class_set,
    )
