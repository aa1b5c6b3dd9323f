"""Diffexpr.

Univariate differential expression: statistics, permutation p-values, multiple-testing
adjustments, ranking and heatmap export.
"""

from app.libs.diffexpr.adjust import adjust_bh, adjust_bonferroni, adjust_hochberg
from app.libs.diffexpr.permutation import PValueResult, parametric_pvalues, permutation_pvalues
from app.libs.diffexpr.ranking import heatmap_export, rank_genes, significant_genes
from app.libs.diffexpr.statistics import anova_f, batch_statistics, snr, welch_t

__all__ = [
    "PValueResult",
    "adjust_bh",
    "adjust_bonferroni",
    "adjust_hochberg",
    "anova_f",
    "batch_statistics",
    "heatmap_export",
    "parametric_pvalues",
    "permutation_pvalues",
    "rank_genes",
    "significant_genes",
    "snr",
    "welch_t",
]
