from itertools import combinations

import numpy as np
import pytest

from app.exception import DataValidationError, InvalidParameterError, SelectionError
from app.libs.featsel import (
    CfsEvaluator,
    SelectorConfig,
    WrapperEvaluator,
    best_first,
    cfs_merit,
    correlation_ratio,
    greedy_stepwise,
    run_selector,
    select_top_k,
    svm_rfe,
    wrapper_eval,
)
from app.libs.featsel.cfs import merit_from_sums
from app.libs.learners import fit, svm_weights
from app.types import FeatureRanking


def _direct_merit(X: np.ndarray, labels: list[str]) -> float:
    """CFS merit straight from its definition."""
    classes = list(dict.fromkeys(labels))
    codes = np.array([classes.index(label) for label in labels])
    r_cf = []
    for column in X.T:
        total = ((column - column.mean()) ** 2).sum()
        between = sum(
            (codes == c).sum() * (column[codes == c].mean() - column.mean()) ** 2 for c in range(len(classes))
        )
        r_cf.append(np.sqrt(between / total))
    k = X.shape[1]
    if k == 1:
        return r_cf[0]
    r_ff = np.mean([abs(np.corrcoef(X[:, a], X[:, b])[0, 1]) for a, b in combinations(range(k), 2)])
    return k * np.mean(r_cf) / np.sqrt(k + k * (k - 1) * r_ff)


def _random_dataset(build_dataset, seed: int, n_features: int = 8, n_per_class: int = 10, signal: float = 1.0):
    rng = np.random.default_rng(seed)
    labels = ["HC"] * n_per_class + ["ND"] * n_per_class + ["PD"] * n_per_class
    codes = np.repeat([0, 1, 2], n_per_class)
    values = rng.normal(size=(n_features, codes.size))
    values += signal * rng.normal(size=(n_features, 3))[:, codes]
    return build_dataset(values, labels)


def test_cfs_merit_matches_direct_formula(build_dataset):
    rng = np.random.default_rng(0)
    for seed in range(10):
        dataset = _random_dataset(build_dataset, seed)
        size = int(rng.integers(1, 6))
        subset = sorted(rng.choice(dataset.matrix.probeset_ids, size=size, replace=False).tolist())

        expected = _direct_merit(dataset.features(subset), dataset.labels)

        assert cfs_merit(subset, dataset) == pytest.approx(expected, rel=1e-10, abs=1e-12)
        assert CfsEvaluator(dataset).score(subset) == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_cfs_merit_examples(build_dataset):
    dataset = _random_dataset(build_dataset, 3)
    single = dataset.matrix.probeset_ids[0]
    eta = correlation_ratio(dataset.features([single]), dataset.class_codes, 3)[0]

    assert cfs_merit([single], dataset) == pytest.approx(eta)
    assert float(merit_from_sums(2, 1.0, 0.0)) == pytest.approx(0.7071067811865476)


def test_cfs_merit_constant_feature_contributes_nothing(separable_dataset):
    assert cfs_merit(["c_flat"], separable_dataset) == 0.0
    assert cfs_merit(["a_marker"], separable_dataset) == 1.0


def test_cfs_merit_of_a_feature_and_its_copy(build_dataset):
    for seed in range(5):
        base = _random_dataset(build_dataset, seed, n_features=3)
        values = np.vstack([base.matrix.values, 3.0 * base.matrix.values[0] + 1.0])
        dataset = build_dataset(values, base.labels)

        assert cfs_merit(["f000", "f003"], dataset) == pytest.approx(cfs_merit(["f000"], dataset), rel=1e-12)


def test_cfs_evaluator_incremental_scores_match_full_scores(build_dataset):
    dataset = _random_dataset(build_dataset, 5)
    evaluator = CfsEvaluator(dataset)
    selected = ["f002", "f005"]
    candidates = ["f000", "f001", "f007"]

    incremental = evaluator.score_candidates(selected, candidates)

    expected = [evaluator.score([*selected, candidate]) for candidate in candidates]
    np.testing.assert_allclose(incremental, expected, rtol=1e-12)


def test_greedy_returns_the_single_informative_feature(separable_dataset):
    subset = greedy_stepwise(CfsEvaluator(separable_dataset))

    assert subset.feature_ids == ["a_marker"]
    assert subset.score == 1.0
    assert subset.evaluator == "cfs"


def test_greedy_admits_one_of_two_identical_copies(build_dataset):
    codes = np.repeat([0, 1, 2], 6)
    best = codes + np.tile([0.0, 0.3, -0.3, 0.1, -0.1, 0.0], 3)
    values = np.vstack([np.zeros(18), best, best, np.ones(18)])
    dataset = build_dataset(values, ["HC"] * 6 + ["ND"] * 6 + ["PD"] * 6, probeset_ids=["a", "b_copy", "a_copy", "z"])

    subset = greedy_stepwise(CfsEvaluator(dataset))

    assert subset.feature_ids == ["a_copy"]


def test_greedy_trace_is_strictly_increasing(build_dataset):
    for seed in range(5):
        subset = greedy_stepwise(CfsEvaluator(_random_dataset(build_dataset, seed, n_features=12)))

        scores = [step.score for step in subset.trace]
        assert len(subset.trace) == len(subset.feature_ids)
        assert [step.feature_id for step in subset.trace] == subset.feature_ids
        assert all(a < b for a, b in zip(scores, scores[1:]))
        assert subset.score == scores[-1]


def test_greedy_without_informative_feature(build_dataset):
    dataset = build_dataset(np.zeros((3, 6)), ["HC"] * 3 + ["PD"] * 3)

    with pytest.raises(SelectionError, match="no informative start"):
        greedy_stepwise(CfsEvaluator(dataset))
    with pytest.raises(SelectionError, match="no informative start"):
        best_first(CfsEvaluator(dataset))


def test_best_first_with_zero_stale_limit_matches_greedy(separable_dataset):
    evaluator = CfsEvaluator(separable_dataset)

    subset = best_first(evaluator, stale_limit=0)

    assert subset.feature_ids == greedy_stepwise(evaluator).feature_ids


def test_best_first_never_scores_below_greedy(build_dataset):
    for seed in range(8):
        evaluator = CfsEvaluator(_random_dataset(build_dataset, seed, n_features=10))

        assert best_first(evaluator).score >= greedy_stepwise(evaluator).score - 1e-12


def test_best_first_reaches_exhaustive_optimum(build_dataset):
    hits = 0
    trials = 20
    for seed in range(trials):
        dataset = _random_dataset(build_dataset, 100 + seed, n_features=5, signal=0.6)
        evaluator = CfsEvaluator(dataset)
        features = dataset.matrix.probeset_ids
        optimum = max(
            evaluator.score(list(subset)) for size in range(1, 6) for subset in combinations(features, size)
        )

        if best_first(evaluator).score >= optimum - 1e-12:
            hits += 1

    assert hits >= 0.9 * trials


def test_best_first_rejects_negative_stale_limit(separable_dataset):
    with pytest.raises(InvalidParameterError):
        best_first(CfsEvaluator(separable_dataset), stale_limit=-1)


def test_wrapper_eval_perfect_feature(build_dataset):
    codes = np.repeat([0, 1], 10)
    values = np.vstack([codes.astype(float), np.random.default_rng(0).normal(size=20)])
    dataset = build_dataset(values, ["HC"] * 10 + ["PD"] * 10)

    assert wrapper_eval(["f000"], dataset) == 1.0


def test_wrapper_eval_noise_is_near_chance(build_dataset):
    rng = np.random.default_rng(17)
    dataset = build_dataset(rng.normal(size=(1, 100)), ["HC"] * 50 + ["PD"] * 50)

    accuracy = wrapper_eval(["f000"], dataset, seed=4)

    assert 0.3 <= accuracy <= 0.7


def test_wrapper_eval_is_deterministic(build_dataset):
    dataset = _random_dataset(build_dataset, 2)

    first = wrapper_eval(["f001", "f003"], dataset, seed=9)
    second = wrapper_eval(["f001", "f003"], dataset, seed=9)

    assert first == second


def test_wrapper_needs_enough_samples_per_class(build_dataset):
    dataset = build_dataset(np.zeros((1, 9)), ["HC"] * 5 + ["PD"] * 4)

    with pytest.raises(DataValidationError, match="PD"):
        WrapperEvaluator(dataset, internal_folds=5)


def test_wrapper_candidates_do_not_depend_on_workers(build_dataset):
    dataset = _random_dataset(build_dataset, 6, n_features=5)
    candidates = ["f001", "f002", "f003", "f004"]

    serial = WrapperEvaluator(dataset, seed=1).score_candidates(["f000"], candidates)
    threaded = WrapperEvaluator(dataset, seed=1, workers=3).score_candidates(["f000"], candidates)

    assert serial.tolist() == threaded.tolist()


def test_svm_rfe_ranks_every_feature_with_n_minus_one_trainings(build_dataset):
    dataset = _random_dataset(build_dataset, 4, n_features=7)

    ranking = svm_rfe(dataset)

    assert sorted(ranking.feature_ids) == sorted(dataset.matrix.probeset_ids)
    assert ranking.trainings == 6
    assert len(ranking.criteria) == 7


def test_svm_rfe_single_pass_matches_weight_order(build_dataset):
    dataset = _random_dataset(build_dataset, 8, n_features=6)
    model = fit("linear_svm", dataset.features(), dataset.labels, dataset.class_set)
    weight = np.sum([np.asarray(machine.weights) ** 2 for machine in svm_weights(model)], axis=0)
    ids = dataset.matrix.probeset_ids
    expected = sorted(ids, key=lambda f: (weight[ids.index(f)], f))[::-1]

    ranking = svm_rfe(dataset, eliminate_per_iteration=6)

    assert ranking.trainings == 1
    assert ranking.feature_ids == expected


def test_svm_rfe_finds_planted_features(build_dataset):
    rng = np.random.default_rng(23)
    codes = np.repeat([0, 1], 20)
    values = rng.normal(size=(52, 40))
    values[[7, 31]] += 2.0 * codes
    dataset = build_dataset(values, ["HC"] * 20 + ["PD"] * 20)

    ranking = svm_rfe(dataset)

    assert {"f007", "f031"} <= set(ranking.feature_ids[:5])


def test_svm_rfe_keeps_duplicates_close(build_dataset):
    codes = np.repeat([0, 1], 8)
    strong = 2.0 * codes + np.tile([0.0, 0.4, -0.4, 0.2, -0.2, 0.1, -0.1, 0.0], 2)
    weak = 0.5 * codes + np.tile([0.3, -0.3, 0.0, 0.2, -0.2, 0.1, -0.1, 0.0], 2)
    flat = np.tile([0.5, -0.5], 8)
    dataset = build_dataset(
        np.vstack([strong, weak, strong, flat]), ["HC"] * 8 + ["PD"] * 8, probeset_ids=["s1", "w", "s2", "n"]
    )

    ranking = svm_rfe(dataset)

    assert abs(ranking.feature_ids.index("s1") - ranking.feature_ids.index("s2")) <= 2


def test_svm_rfe_needs_two_features(build_dataset):
    dataset = build_dataset(np.ones((1, 4)), ["HC", "HC", "PD", "PD"])

    with pytest.raises(DataValidationError):
        svm_rfe(dataset)


def test_select_top_k_bounds():
    ranking = FeatureRanking(feature_ids=["a", "b", "c"], criteria=[3.0, 2.0, 1.0], trainings=2)

    assert select_top_k(ranking, 3).feature_ids == ["a", "b", "c"]
    top = select_top_k(ranking, 1)
    assert top.feature_ids == ["a"]
    assert top.evaluator == "ranker"
    for k in (0, 4):
        with pytest.raises(InvalidParameterError):
            select_top_k(ranking, k)


def test_selector_config_pairs_selector_with_search():
    assert SelectorConfig(kind="rsvm").resolved_search() == "ranker"
    assert SelectorConfig(kind="cfs").resolved_search() == "greedy"
    with pytest.raises(InvalidParameterError):
        SelectorConfig(kind="rsvm", search="greedy").resolved_search()
    with pytest.raises(InvalidParameterError):
        SelectorConfig(kind="wse", search="ranker").resolved_search()


@pytest.mark.parametrize(
    "config",
    [
        SelectorConfig(kind="cfs", search="bestfirst"),
        SelectorConfig(kind="wse", internal_folds=3, seed=5),
        SelectorConfig(kind="rsvm", top_k=4),
    ],
)
def test_run_selector_is_deterministic(build_dataset, config):
    dataset = _random_dataset(build_dataset, 12, n_features=6)

    first = run_selector(config, dataset)
    second = run_selector(config, dataset)

    assert first == second
    if config.kind == "rsvm":
        assert first.subset.feature_ids == first.ranking.feature_ids[:4]
