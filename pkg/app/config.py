"""Run configuration.

Values are merged from, in increasing precedence: the defaults below, `BIOMARKER_*`
environment variables (a `.env` file is loaded first), a `key=value` config file and
explicit command-line flags. Every run echoes the effective values, with all seeds
materialized, to `run_config.env`; passing that file back via `--config` reproduces it.
"""

import os
import secrets
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from app.exception import InvalidParameterError
from app.libs.featsel import SelectorConfig
from app.libs.learners import ClassifierConfig
from app.libs.preprocess import PreprocessOptions
from app.types import (
    ClassifierKind,
    InformativeGene,
    PermutationPlan,
    PValueMode,
    SearchKind,
    SelectorKind,
    Stage,
    StatisticKind,
    SynthSpec,
)

ENV_PREFIX = "BIOMARKER_"
ECHO_FILENAME = "run_config.env"

# offsets of the per-stage seeds from the base seed
SEED_OFFSETS = {
    "permutation_seed": 1,
    "fold_seed": 2,
    "selector_seed": 3,
    "classifier_seed": 4,
    "synth_seed": 5,
}

CLASSIFIER_ALIASES: dict[str, ClassifierKind] = {
    "nb": "naive_bayes",
    "svm": "linear_svm",
    "dtable": "decision_table",
}


class RunConfig(BaseModel):
    """Every option of a run."""

    model_config = ConfigDict(extra="forbid", use_attribute_docstrings=True)

    # inputs and outputs
    input: Path | None = None
    """The expression table."""

    calls: Path | None = None
    """The detection-call table."""

    labels: Path | None = None
    """The sample-to-class table; class prefixes of the sample IDs are used otherwise."""

    input_stage: Stage | None = None
    """The transforms already applied to the input; raw for preprocess, zscore for later stages when unset."""

    out_dir: Path = Path("out")
    """Where artifacts are written."""

    seed: int | None = None
    """The base seed; drawn from OS entropy when unset."""

    workers: int = Field(default=1, ge=1)
    """Threads for permutations, wrapper candidates and folds."""

    log_level: str = "INFO"
    """The stderr log level."""

    # preprocess
    present_fraction: float = Field(default=0.25, gt=0.0, le=1.0)
    noise_floor: float = 100.0
    surrogate_floor: float | None = None
    z_threshold: float = Field(default=5.0, gt=0.0)
    log_base: float = Field(default=2.0, gt=0.0)
    log_epsilon: float = Field(default=1.0, gt=0.0)
    impute: bool = True

    # rank
    statistic: StatisticKind = "f"
    pvalue_mode: PValueMode = "permutation"
    permutations: int = Field(default=1000, ge=1)
    permutation_seed: int | None = None
    fdr_cutoff: float = Field(default=0.01, gt=0.0, le=1.0)
    heatmap_top: int = Field(default=40, ge=0)

    # select
    selector: SelectorKind = "rsvm"
    search: SearchKind | None = None
    top_k: int = Field(default=20, ge=1)
    internal_folds: int = Field(default=5, ge=2)
    stale_limit: int = Field(default=5, ge=0)
    eliminate_per_iteration: int = Field(default=1, ge=1)
    eliminate_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)
    svm_c: float = Field(default=1.0, gt=0.0)
    wrapper_classifier: ClassifierKind = "decision_table"
    selector_seed: int | None = None

    # evaluate
    classifier: ClassifierKind = "linear_svm"
    folds: int = Field(default=10, ge=2)
    fold_seed: int | None = None
    classifier_seed: int | None = None
    continue_on_failure: bool = False
    nb_variance_floor: float = Field(default=1e-6, gt=0.0)
    lvq_prototypes: int = Field(default=4, ge=1)
    lvq_learning_rate: float = Field(default=0.3, ge=0.0)
    lvq_epochs: int = Field(default=1000, ge=1)
    dtable_bins: int = Field(default=10, ge=1)

    # simulate
    genes: int = Field(default=2000, ge=1)
    class_sizes: list[int] = Field(default_factory=lambda: [22, 33, 50])
    class_names: list[str] | None = None
    informative: int = Field(default=10, ge=0)
    effect: float = 2.0
    log_mean_low: float = 5.0
    log_mean_high: float = 10.0
    present_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    outlier_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    outlier_magnitude: float = Field(default=6.0, ge=0.0)
    synth_seed: int | None = None

    @field_validator("class_sizes", "class_names", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        """Accept comma-separated strings from the environment and config files."""
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("classifier", "wrapper_classifier", mode="before")
    @classmethod
    def _resolve_alias(cls, value: Any) -> Any:
        """Map short classifier names such as `nb` or `svm` to their kinds."""
        return CLASSIFIER_ALIASES.get(value, value) if isinstance(value, str) else value

    @classmethod
    def resolve(cls, overrides: dict[str, Any] | None = None, config_file: Path | str | None = None) -> "RunConfig":
        """Merge environment, config file and explicit overrides.

        Args:
            overrides (dict[str, Any] | None): Explicit values; None entries are ignored.
            config_file (Path | str | None): A `key=value` file.

        Returns:
            RunConfig: The merged configuration, seeds not yet materialized.

        Raises:
            InvalidParameterError: On unknown keys or invalid values.
        """
        values: dict[str, Any] = {}
        for key, value in os.environ.items():
            if key.startswith(ENV_PREFIX):
                name = key[len(ENV_PREFIX) :].lower()
                if name in cls.model_fields:
                    values[name] = value
        if config_file is not None:
            path = Path(config_file)
            if not path.is_file():
                raise InvalidParameterError(f"config file not found: {path}")
            for key, value in dotenv_values(path).items():
                name = key.strip().lower().replace("-", "_")
                if name not in cls.model_fields:
                    raise InvalidParameterError(f"unknown config key in {path}: {key}")
                if value is not None and value != "":
                    values[name] = value
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})

        try:
            return cls.model_validate(values)
        except ValidationError as e:
            error = e.errors()[0]
            location = ".".join(str(part) for part in error["loc"])
            raise InvalidParameterError(f"invalid configuration value for {location}: {error['msg']}") from e

    def materialized(self) -> "RunConfig":
        """Return a copy in which the base seed and every stage seed are set."""
        seed = self.seed if self.seed is not None else secrets.randbits(32)
        update: dict[str, Any] = {"seed": seed}
        for name, offset in SEED_OFFSETS.items():
            if getattr(self, name) is None:
                update[name] = seed + offset
        return self.model_copy(update=update)

    def echo(self) -> str:
        """Render the configuration as sorted `key=value` lines, omitting unset values."""
        lines = []
        for key, value in sorted(self.model_dump().items()):
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(str(item) for item in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def write_echo(self, out_dir: Path | None = None) -> Path:
        """Write `run_config.env` into the output directory."""
        directory = out_dir or self.out_dir
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / ECHO_FILENAME
        path.write_text(self.echo(), encoding="utf-8")
        return path

    def preprocess_options(self) -> PreprocessOptions:
        """Get the preprocessing thresholds.

        Returns:
            PreprocessOptions: The filter, outlier and transform options of this run.
        """
        return PreprocessOptions(
            present_fraction=self.present_fraction,
            noise_floor=self.noise_floor,
            surrogate_floor=self.surrogate_floor,
            z_threshold=self.z_threshold,
            log_base=self.log_base,
            log_epsilon=self.log_epsilon,
            impute=self.impute,
        )

    def permutation_plan(self) -> PermutationPlan:
        """Get the permutation plan of the rank step.

        Returns:
            PermutationPlan: The round count and the permutation stage seed.

        Raises:
            InvalidParameterError: If the seeds are not materialized.
        """
        return PermutationPlan(permutation_count=self.permutations, seed=self._seed("permutation_seed"))

    def selector_config(self) -> SelectorConfig:
        """Get the feature selector settings.

        Returns:
            SelectorConfig: The selector, its search and the selector stage seed.

        Raises:
            InvalidParameterError: If the seeds are not materialized.
        """
        return SelectorConfig(
            kind=self.selector,
            search=self.search,
            top_k=self.top_k,
            internal_folds=self.internal_folds,
            wrapper_classifier=self.wrapper_classifier,
            stale_limit=self.stale_limit,
            eliminate_per_iteration=self.eliminate_per_iteration,
            eliminate_fraction=self.eliminate_fraction,
            C=self.svm_c,
            seed=self._seed("selector_seed"),
            workers=self.workers,
        )

    def classifier_config(self) -> ClassifierConfig:
        """Get the classifier settings.

        Returns:
            ClassifierConfig: The classifier kind, its hyperparameters and the classifier stage seed.

        Raises:
            InvalidParameterError: If the seeds are not materialized.
        """
        return ClassifierConfig(
            kind=self.classifier,
            C=self.svm_c,
            nb_variance_floor=self.nb_variance_floor,
            lvq_prototypes=self.lvq_prototypes,
            lvq_learning_rate=self.lvq_learning_rate,
            lvq_epochs=self.lvq_epochs,
            dtable_bins=self.dtable_bins,
            seed=self._seed("classifier_seed"),
        )

    def synth_spec(self) -> SynthSpec:
        """The generator parameters; planted genes are spread evenly over the rows.

        Planted gene j is shifted by `effect` in class j mod C and unshifted elsewhere.

        Returns:
            SynthSpec: The generator parameters with the synthesis stage seed.

        Raises:
            InvalidParameterError: If more genes are planted than generated, or the seeds are not materialized.
        """
        n_classes = len(self.class_sizes)
        if self.informative > self.genes:
            raise InvalidParameterError(f"informative ({self.informative}) exceeds genes ({self.genes})")
        spacing = self.genes // max(self.informative, 1)
        informative = [
            InformativeGene(
                index=j * spacing,
                shifts=[self.effect if c == j % n_classes else 0.0 for c in range(n_classes)],
            )
            for j in range(self.informative)
        ]
        return SynthSpec(
            genes=self.genes,
            class_sizes=self.class_sizes,
            class_names=self.class_names,
            informative=informative,
            log_mean_range=(self.log_mean_low, self.log_mean_high),
            present_rate=self.present_rate,
            outlier_rate=self.outlier_rate,
            outlier_magnitude=self.outlier_magnitude,
            seed=self._seed("synth_seed"),
        )

    def _seed(self, name: Literal["permutation_seed", "fold_seed", "selector_seed", "classifier_seed", "synth_seed"]) -> int:
        """Get a stage seed, deriving it from the base seed when only that is set.

        Args:
            name (str): The stage seed field.

        Returns:
            int: The seed.

        Raises:
            InvalidParameterError: If neither the stage seed nor the base seed is set.
        """
        value = getattr(self, name)
        if value is not None:
            return value
        if self.seed is None:
            raise InvalidParameterError(f"{name} is unset; materialize the configuration first")
        return self.seed + SEED_OFFSETS[name]
