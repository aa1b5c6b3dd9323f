"""A script to run the full-scale acceptance checks on synthetic data.

```
python -m experiment.acceptance --output experiment/evaluation_result.json
```

Add `--exact-rfe` to eliminate one feature per RFE iteration (slow on 2,000 genes).
"""

import json
import time
from argparse import ArgumentParser

import numpy as np
from loguru import logger

from app.libs.diffexpr import rank_genes, significant_genes
from app.libs.evaluate import accuracy, kappa, nested_cv, stratified_folds
from app.libs.featsel import SelectorConfig, run_selector, svm_rfe
from app.libs.learners import ClassifierConfig
from app.libs.preprocess import PreprocessOptions, detect_outliers, run_preprocessing
from app.libs.synthgen import generate
from app.types import ConfusionMatrix, InformativeGene, PermutationPlan, SynthSpec

PUBLISHED = {
    "wse": ([[4, 6, 12], [0, 17, 16], [0, 2, 48]], 0.657143, 0.4011),
    "cfs": ([[9, 3, 5], [1, 19, 5], [3, 4, 31]], 0.7375, 0.577),
    "rsvm": ([[16, 0, 6], [2, 26, 5], [1, 4, 45]], 0.828571, 0.7228),
}


def published_metrics() -> dict:
    """Accuracy and kappa of the three published confusion matrices."""
    results = {}
    for name, (counts, expected_accuracy, expected_kappa) in PUBLISHED.items():
        cm = ConfusionMatrix(class_set=["HC", "ND", "PD"], counts=counts)
        results[name] = {
            "n": cm.n_instances,
            "accuracy": accuracy(cm),
            "kappa": kappa(cm),
            "accuracy_ok": abs(accuracy(cm) - expected_accuracy) <= 5e-4,
            "kappa_ok": abs(kappa(cm) - expected_kappa) <= 5e-4,
        }
    return results


def permutation_calibration(seed: int) -> dict:
    """Share of null genes below p = 0.05 with 1,000 label permutations, and a bit-identical rerun."""
    dataset, _, _ = generate(SynthSpec(genes=2000, seed=seed))
    # every gene kept and none imputed, so all 2,000 stay exchangeable under the null
    processed = run_preprocessing(dataset, options=PreprocessOptions(noise_floor=0.0, impute=False)).dataset
    plan = PermutationPlan(permutation_count=1000, seed=seed)
    first = rank_genes(processed, "f", plan)
    second = rank_genes(processed, "f", plan)
    fraction = float(np.mean([score.raw_p < 0.05 for score in first]))  # noqa: PLR2004
    return {
        "genes": len(first),
        "fraction_below_0.05": fraction,
        "calibrated": 0.03 <= fraction <= 0.07,  # noqa: PLR2004
        "reproducible": [s.raw_p for s in first] == [s.raw_p for s in second],
    }


def planted_recovery(seed: int, exact_rfe: bool, workers: int) -> dict:
    """Planted genes found by univariate ranking and by RFE, and nested-CV accuracy of RSVM with SVM."""
    informative = [
        InformativeGene(index=j * 200, shifts=[2.0 if c == j % 3 else 0.0 for c in range(3)]) for j in range(10)
    ]
    spec = SynthSpec(genes=2000, informative=informative, log_mean_range=(7.0, 10.0), seed=seed)
    dataset, calls, truth = generate(spec)
    processed = run_preprocessing(dataset, calls).dataset
    planted = set(truth.informative_ids)

    significant = {s.probeset_id for s in significant_genes(rank_genes(processed, "f", pvalue_mode="parametric"))}
    fraction = 0.0 if exact_rfe else 0.1
    ranking = svm_rfe(processed, eliminate_fraction=fraction)
    top20 = set(ranking.feature_ids[:20])

    selector = SelectorConfig(kind="rsvm", top_k=20, eliminate_fraction=fraction)
    plan = stratified_folds(processed.labels, k=10, seed=seed)
    report = nested_cv(processed, selector, ClassifierConfig(kind="linear_svm"), plan, workers=workers)
    return {
        "planted_significant": len(planted & significant),
        "false_positives": len(significant - planted),
        "planted_in_rfe_top20": len(planted & top20),
        "nested_cv_accuracy": report.accuracy,
        "ok": len(planted & significant) >= 8  # noqa: PLR2004
        and len(significant - planted) <= 2  # noqa: PLR2004
        and len(planted & top20) >= 8  # noqa: PLR2004
        and report.accuracy >= 0.85,  # noqa: PLR2004
    }


def leakage_canary(seed: int, workers: int) -> dict:
    """Honest nested CV on null data against the same run with selection done before the split."""
    dataset, calls, _ = generate(SynthSpec(genes=500, class_sizes=[35, 35, 35], seed=seed))
    processed = run_preprocessing(dataset, calls).dataset
    majority = max(processed.class_counts().values()) / len(processed.labels)
    plan = stratified_folds(processed.labels, k=10, seed=seed)
    selector = SelectorConfig(kind="rsvm", top_k=20, eliminate_fraction=0.1)
    classifier = ClassifierConfig(kind="linear_svm")
    honest = nested_cv(processed, selector, classifier, plan, workers=workers)

    # selection on all rows before the split
    leaked_features = run_selector(selector, processed).subset.feature_ids
    leaky = nested_cv(processed.take_probesets(leaked_features), None, classifier, plan, workers=workers)
    return {
        "majority_rate": majority,
        "honest_accuracy": honest.accuracy,
        "leaky_accuracy": leaky.accuracy,
        "ok": abs(honest.accuracy - majority) <= 0.10 and leaky.accuracy - majority >= 0.15,  # noqa: PLR2004
    }


def outlier_recovery(seed: int) -> dict:
    """Share of injected 6-std outliers that detection flags at |z| > 5."""
    dataset, _, truth = generate(SynthSpec(genes=2000, outlier_rate=0.002, outlier_magnitude=6.0, seed=seed))
    flagged = {(r.probeset_id, r.sample_id) for r in detect_outliers(dataset, threshold=5.0)}
    injected = [(o.probeset_id, o.sample_id) for o in truth.outliers]
    recovered = sum(cell in flagged for cell in injected)
    rate = recovered / max(len(injected), 1)
    return {
        "injected": len(injected),
        "recovered": recovered,
        "flagged": len(flagged),
        "recovery_rate": rate,
        "ok": rate >= 0.95,  # noqa: PLR2004
    }


if __name__ == "__main__":
    parser = ArgumentParser()
    parser.add_argument("--output", type=str, required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--exact-rfe", action="store_true")

    args = parser.parse_args()

    results = {}
    for name, check in [
        ("published_metrics", published_metrics),
        ("permutation_calibration", lambda: permutation_calibration(args.seed)),
        ("planted_recovery", lambda: planted_recovery(args.seed, args.exact_rfe, args.workers)),
        ("leakage_canary", lambda: leakage_canary(args.seed, args.workers)),
        ("outlier_recovery", lambda: outlier_recovery(args.seed)),
    ]:
        started = time.perf_counter()
        with logger.contextualize(check=name):
            results[name] = check()
        results[name]["seconds"] = round(time.perf_counter() - started, 1)
        logger.info(f"{name}: {results[name]}")

    with open(args.output, "w") as f:
        f.write(json.dumps(results, indent=2, sort_keys=True))
