import math

import numpy as np
import pytest
from scipy import stats

from app.exception import DegenerateStatisticError, InvalidParameterError
from app.libs.diffexpr import (
    adjust_bh,
    adjust_bonferroni,
    adjust_hochberg,
    anova_f,
    heatmap_export,
    parametric_pvalues,
    permutation_pvalues,
    rank_genes,
    significant_genes,
    snr,
    welch_t,
)
from app.libs.preprocess import PreprocessOptions, run_preprocessing
from app.libs.synthgen import generate
from app.types import InformativeGene, PermutationPlan, SynthSpec


def test_welch_t_examples():
    assert welch_t([1, 2, 3], [1, 2, 3]) == 0.0
    assert welch_t([4, 6], [1, 3]) == pytest.approx(3 / np.sqrt(2))


def test_welch_t_is_antisymmetric():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=7), rng.normal(1.0, 2.0, size=5)

    assert welch_t(a, b) == pytest.approx(-welch_t(b, a))


def test_welch_t_constant_groups():
    assert welch_t([2, 2], [2, 2]) == 0.0
    with pytest.raises(DegenerateStatisticError):
        welch_t([1, 1], [2, 2])


def test_welch_t_needs_two_values():
    with pytest.raises(InvalidParameterError):
        welch_t([1], [2, 3])


def test_snr_examples():
    assert snr([1.5, 2.0, 2.5], [0.5, 1.0, 1.5]) == pytest.approx(1.0)
    assert snr([1, 2, 3], [1, 2, 3]) == 0.0
    assert snr([1, 2, 4], [0, 5, 9]) == pytest.approx(-snr([0, 5, 9], [1, 2, 4]))
    with pytest.raises(DegenerateStatisticError):
        snr([3, 3], [1, 1])


def test_anova_f_examples():
    assert anova_f([[1, 3], [2, 2], [0, 4]]) == 0.0
    perturbed = anova_f([[0, 0.01], [1, 1.01]])
    assert np.isfinite(perturbed)
    assert perturbed > 1e4
    with pytest.raises(DegenerateStatisticError):
        anova_f([[1, 1], [2, 2]])


def test_anova_f_matches_reference_and_group_order():
    rng = np.random.default_rng(4)
    groups = [rng.normal(m, 1.0, size=n) for m, n in [(0.0, 6), (0.5, 9), (1.5, 4)]]

    assert anova_f(groups) == pytest.approx(stats.f_oneway(*groups).statistic)
    assert anova_f(groups[::-1]) == pytest.approx(anova_f(groups))


def test_anova_f_equals_squared_t_for_equal_sizes():
    rng = np.random.default_rng(9)
    a, b = rng.normal(size=8), rng.normal(0.7, 1.0, size=8)

    assert anova_f([a, b]) == pytest.approx(welch_t(a, b) ** 2)


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def _sample_variance(values: list[float]) -> float:
    center = _mean(values)
    return sum((value - center) ** 2 for value in values) / (len(values) - 1)


def _random_group(rng: np.random.Generator) -> list[float]:
    return rng.normal(rng.uniform(-2.0, 2.0), rng.uniform(0.5, 2.0), size=int(rng.integers(2, 8))).tolist()


def test_statistics_match_direct_formulas():
    rng = np.random.default_rng(31)
    for _ in range(1000):
        a, b, c = _random_group(rng), _random_group(rng), _random_group(rng)
        va, vb = _sample_variance(a), _sample_variance(b)
        diff = _mean(a) - _mean(b)

        expected_t = diff / math.sqrt(va / len(a) + vb / len(b))
        expected_snr = diff / (math.sqrt(va) + math.sqrt(vb))
        groups = [a, b, c]
        grand = _mean(a + b + c)
        between = sum(len(g) * (_mean(g) - grand) ** 2 for g in groups) / (len(groups) - 1)
        within = sum((len(g) - 1) * _sample_variance(g) for g in groups) / (len(a) + len(b) + len(c) - len(groups))
        pooled = ((len(a) - 1) * va + (len(b) - 1) * vb) / (len(a) + len(b) - 2)
        pooled_t = diff / math.sqrt(pooled * (1 / len(a) + 1 / len(b)))

        assert welch_t(a, b) == pytest.approx(expected_t, rel=1e-12, abs=1e-12)
        assert snr(a, b) == pytest.approx(expected_snr, rel=1e-12, abs=1e-12)
        assert anova_f(groups) == pytest.approx(between / within, rel=1e-12, abs=1e-12)
        assert anova_f([a, b]) == pytest.approx(pooled_t**2, rel=1e-9, abs=1e-12)


def test_adjust_examples():
    np.testing.assert_allclose(adjust_bh([0.01, 0.02, 0.03]), [0.03, 0.03, 0.03])
    np.testing.assert_allclose(adjust_bonferroni([0.01, 0.4]), [0.02, 0.8])
    np.testing.assert_allclose(adjust_hochberg([0.01, 0.04]), [0.02, 0.04])
    for adjust in (adjust_bh, adjust_bonferroni, adjust_hochberg):
        assert adjust([0.37]).tolist() == [0.37]


@pytest.mark.parametrize("bad", [[0.0, 0.5], [0.5, 1.2], [np.nan]])
def test_adjust_rejects_invalid_pvalues(bad):
    with pytest.raises(InvalidParameterError):
        adjust_bh(bad)


def _adjust_by_enumeration(p: np.ndarray, critical: np.ndarray) -> np.ndarray:
    """Adjusted p-values as the smallest level at which the step-up rule rejects each hypothesis.

    `critical[k]` is the level at which the k-th smallest p-value passes its bound; at a
    level L the rule rejects every p-value up to the largest one passing.
    """
    sorted_p = np.sort(p, kind="stable")
    adjusted = np.ones(p.size)
    rejected = np.zeros(p.size, dtype=bool)
    for level in sorted(set(critical.tolist())):
        passing = [k for k in range(p.size) if critical[k] <= level]
        reject = p <= sorted_p[max(passing)]
        adjusted[reject & ~rejected] = min(level, 1.0)
        rejected |= reject
    return adjusted


def _random_pvalues(rng: np.random.Generator) -> np.ndarray:
    p = rng.uniform(1e-6, 1.0, size=int(rng.integers(1, 11))) ** 3
    if rng.random() < 0.3:  # noqa: PLR2004
        p = np.ceil(p * 20) / 20
    return p


def test_adjustments_match_threshold_enumeration():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        p = _random_pvalues(rng)
        m = p.size
        sorted_p = np.sort(p, kind="stable")
        positions = np.arange(1, m + 1)

        bh, bonferroni, hochberg = adjust_bh(p), adjust_bonferroni(p), adjust_hochberg(p)

        np.testing.assert_allclose(bh, _adjust_by_enumeration(p, m * sorted_p / positions), rtol=0, atol=1e-12)
        np.testing.assert_allclose(
            hochberg, _adjust_by_enumeration(p, (m - positions + 1) * sorted_p), rtol=0, atol=1e-12
        )
        np.testing.assert_allclose(bonferroni, _adjust_by_enumeration(p, m * sorted_p), rtol=0, atol=1e-12)
        assert np.all(bonferroni >= hochberg)
        assert np.all(hochberg >= bh)
        assert np.all(bh >= p)


def _small_dataset(build_dataset):
    rng = np.random.default_rng(21)
    labels = ["HC"] * 5 + ["ND"] * 5 + ["PD"] * 5
    values = rng.normal(size=(6, 15))
    values[0] = np.repeat([0.0, 10.0, 20.0], 5) + rng.normal(0.0, 0.1, 15)
    values[1] = 3.0
    return build_dataset(values, labels)


def test_permutation_pvalue_floor_and_constant_row(build_dataset):
    dataset = _small_dataset(build_dataset)

    result = permutation_pvalues(dataset, "f", PermutationPlan(permutation_count=1000, seed=1))

    assert result.raw_p[0] == pytest.approx(1 / 1001)
    assert result.raw_p[1] == 1.0
    assert result.degenerate[1]
    assert np.isnan(result.statistics[1])
    assert np.all(result.raw_p >= 1 / 1001)
    assert np.all(result.raw_p <= 1.0)


def test_permutation_pvalues_ignore_worker_count(build_dataset):
    dataset = _small_dataset(build_dataset)
    plan = PermutationPlan(permutation_count=200, seed=7)

    serial = permutation_pvalues(dataset, "snr", plan, workers=1)
    threaded = permutation_pvalues(dataset, "snr", plan, workers=4)

    assert np.array_equal(serial.raw_p, threaded.raw_p)


@pytest.mark.slow
def test_permutation_pvalues_are_calibrated_on_null_data():
    dataset, _, _ = generate(SynthSpec(genes=2000, class_sizes=[22, 33, 50], seed=17))
    processed = run_preprocessing(dataset, None, PreprocessOptions(noise_floor=0.0, impute=False)).dataset
    plan = PermutationPlan(permutation_count=1000, seed=3)

    first = permutation_pvalues(processed, "f", plan, workers=4)
    second = permutation_pvalues(processed, "f", plan, workers=4)

    assert processed.matrix.n_probesets == 2000
    assert 0.03 <= np.mean(first.raw_p < 0.05) <= 0.07
    assert np.array_equal(first.raw_p, second.raw_p)
    assert np.array_equal(first.statistics, second.statistics)


def test_batch_statistics_match_scalar_formulas(build_dataset):
    dataset = _small_dataset(build_dataset)
    values = dataset.matrix.values
    codes = dataset.class_codes

    observed = permutation_pvalues(dataset, "f", PermutationPlan(permutation_count=1)).statistics

    for row in (0, 2, 3):
        groups = [values[row, codes == c] for c in range(3)]
        assert observed[row] == pytest.approx(anova_f(groups), rel=1e-9)


def test_two_class_t_is_signed(build_dataset):
    values = np.array([[5.0, 6.0, 5.5, 1.0, 1.5, 0.5]])
    dataset = build_dataset(values, ["HC"] * 3 + ["PD"] * 3)

    observed = permutation_pvalues(dataset, "t", PermutationPlan(permutation_count=1)).statistics

    assert observed[0] == pytest.approx(welch_t(values[0, :3], values[0, 3:]))
    assert observed[0] > 0


def test_parametric_pvalues_match_scipy(build_dataset):
    dataset = _small_dataset(build_dataset)
    values = dataset.matrix.values
    codes = dataset.class_codes

    result = parametric_pvalues(dataset, "f")

    for row in (2, 3, 4):
        expected = stats.f_oneway(*[values[row, codes == c] for c in range(3)]).pvalue
        assert result.raw_p[row] == pytest.approx(expected, rel=1e-9)


def test_parametric_welch_matches_scipy(build_dataset):
    rng = np.random.default_rng(3)
    values = rng.normal(size=(3, 11))
    dataset = build_dataset(values, ["HC"] * 5 + ["PD"] * 6)

    result = parametric_pvalues(dataset, "t")

    for row in range(3):
        expected = stats.ttest_ind(values[row, :5], values[row, 5:], equal_var=False).pvalue
        assert result.raw_p[row] == pytest.approx(expected, rel=1e-9)


def test_parametric_rejects_snr(build_dataset):
    with pytest.raises(InvalidParameterError):
        parametric_pvalues(_small_dataset(build_dataset), "snr")


def test_rank_genes_invariants(build_dataset):
    dataset = _small_dataset(build_dataset)

    scores = rank_genes(dataset, "f", PermutationPlan(permutation_count=300, seed=2))

    assert sorted(score.rank for score in scores) == list(range(1, 7))
    assert sorted(score.probeset_id for score in scores) == sorted(dataset.matrix.probeset_ids)
    assert [score.rank for score in scores] == list(range(1, 7))
    assert all(a.raw_p <= b.raw_p for a, b in zip(scores, scores[1:]))
    for score in scores:
        assert 0 < score.raw_p <= score.fdr_bh <= score.fwer_hochberg <= score.fwer_bonferroni <= 1
    assert scores[0].probeset_id == "f000"
    assert scores[0].top_class == "PD"


def test_rank_genes_breaks_ties_by_probeset_id(build_dataset):
    values = np.full((3, 6), 1.0)
    dataset = build_dataset(values, ["HC"] * 3 + ["PD"] * 3, probeset_ids=["z_at", "a_at", "m_at"])

    scores = rank_genes(dataset, "t", PermutationPlan(permutation_count=10))

    assert [score.probeset_id for score in scores] == ["a_at", "m_at", "z_at"]
    assert all(score.degenerate and score.raw_p == 1.0 for score in scores)


def test_planted_genes_rank_at_the_top():
    informative = [
        InformativeGene(index=j * 20, shifts=[2.0 if c == j % 3 else 0.0 for c in range(3)]) for j in range(10)
    ]
    dataset, calls, truth = generate(SynthSpec(genes=200, informative=informative, log_mean_range=(7.0, 10.0), seed=4))
    processed = run_preprocessing(dataset, calls).dataset

    scores = rank_genes(processed, "f", pvalue_mode="parametric")

    top = {score.probeset_id for score in scores[:15]}
    assert set(truth.informative_ids) <= top
    assert set(truth.informative_ids) <= {score.probeset_id for score in significant_genes(scores, 0.01)}


def test_heatmap_export_layout(build_dataset):
    rng = np.random.default_rng(8)
    labels = ["PD", "HC", "ND", "HC", "PD", "ND", "HC"]
    dataset = build_dataset(rng.normal(size=(5, 7)), labels)
    scores = rank_genes(dataset, "f", pvalue_mode="parametric")

    heatmap = heatmap_export(dataset, scores, top_n=3)

    assert heatmap.matrix.n_probesets == 3
    assert heatmap.matrix.n_samples == 7
    assert heatmap.labels == ["PD", "PD", "HC", "HC", "HC", "ND", "ND"]
    assert heatmap.matrix.probeset_ids == [score.probeset_id for score in scores[:3]]
    assert heatmap.matrix.stage == "zscore"


def test_heatmap_export_clips_and_allows_zero(build_dataset):
    dataset = _small_dataset(build_dataset)
    scores = rank_genes(dataset, "f", pvalue_mode="parametric")

    assert heatmap_export(dataset, scores, top_n=0).matrix.n_probesets == 0
    assert heatmap_export(dataset, scores, top_n=40).matrix.n_probesets == 6
