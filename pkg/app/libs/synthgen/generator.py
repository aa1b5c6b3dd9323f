"""Synthetic MAS5-like expression data with planted markers and outliers."""

import numpy as np
from loguru import logger
from pydantic import ValidationError

from app.exception import DataFormatError
from app.types import (
    CallMatrix,
    DetectionCall,
    ExpressionMatrix,
    LabeledDataset,
    OutlierInjection,
    SynthSpec,
    TruthRecord,
)

# raw values are clamped here so the matrix stays nonnegative
RAW_FLOOR = 0.01


def probeset_name(index: int) -> str:
    """The synthetic probeset ID of a 0-based row, e.g. `g00001_at`."""
    return f"g{index + 1:05d}_at"


def _reference_columns(members: np.ndarray, hit: np.ndarray, column: int) -> np.ndarray:
    """The class-mates an outlier at `column` is placed against.

    These are the members not hit on the same gene; with fewer than two of them, every
    other member, and for a class of two, both.
    """
    for candidates in (np.setdiff1d(members, hit), members[members != column]):
        if candidates.size >= 2:  # noqa: PLR2004
            return candidates
    return members


def generate(spec: SynthSpec) -> tuple[LabeledDataset, CallMatrix, TruthRecord]:
    """Generate a dataset, its detection calls and the ground truth.

    Rows are drawn one at a time from a single generator seeded by `spec.seed`. Each gene
    draws a base-2 log mean and log std from the configured ranges; values are 2 ** normal
    draws, shifted on the log scale by `shift x log std` for planted genes, and clamped at
    0.01. Cells are called Present with probability `present_rate`. An outlier cell is
    moved to the mean plus or minus `outlier_magnitude` sample stds of its class-mates
    that are not outliers on the same gene, on the raw scale and before any outlier is
    placed, upward when the downward value would fall below the clamp. Against those
    class-mates every outlier sits at exactly `outlier_magnitude` leave-one-out stds.

    Args:
        spec (SynthSpec): The dataset parameters.

    Returns:
        tuple[LabeledDataset, CallMatrix, TruthRecord]: The raw dataset, the calls and the truth.
    """
    rng = np.random.default_rng(spec.seed)
    names = spec.labels
    codes = np.repeat(np.arange(len(spec.class_sizes)), spec.class_sizes)
    labels = [names[c] for c in codes]
    sample_ids = [f"{names[c]}_{j + 1:02d}" for c, size in enumerate(spec.class_sizes) for j in range(size)]
    probeset_ids = [probeset_name(g) for g in range(spec.genes)]
    shifts = {gene.index: np.asarray(gene.shifts, dtype=float) for gene in spec.informative}
    members = [np.flatnonzero(codes == c) for c in range(len(spec.class_sizes))]

    values = np.empty((spec.genes, codes.size))
    calls = np.empty((spec.genes, codes.size), dtype="<U1")
    outliers: list[OutlierInjection] = []
    for g in range(spec.genes):
        log_mean = rng.uniform(*spec.log_mean_range)
        log_std = rng.uniform(*spec.log_std_range)
        logs = rng.normal(log_mean, log_std, codes.size)
        if g in shifts:
            logs += shifts[g][codes] * log_std
        row = np.maximum(np.exp2(logs), RAW_FLOOR)

        present = rng.random(codes.size) < spec.present_rate
        calls[g] = np.where(present, DetectionCall.PRESENT.value, DetectionCall.ABSENT.value)

        hit = np.flatnonzero(rng.random(codes.size) < spec.outlier_rate)
        signs = rng.choice([-1, 1], size=hit.size)
        clean = row.copy()
        for s, sign in zip(hit, signs, strict=True):
            reference = clean[_reference_columns(members[codes[s]], hit, s)]
            mean, std = reference.mean(), reference.std(ddof=1)
            value = mean + sign * spec.outlier_magnitude * std
            if value < RAW_FLOOR:
                sign, value = 1, mean + spec.outlier_magnitude * std
            row[s] = value
            injection = OutlierInjection(
                probeset_id=probeset_ids[g], sample_id=sample_ids[s], sign=int(sign), value=float(value)
            )
            outliers.append(injection)
        values[g] = row

    matrix = ExpressionMatrix(probeset_ids=probeset_ids, sample_ids=sample_ids, values=values)
    dataset = LabeledDataset(matrix=matrix, labels=labels, class_set=list(names))
    call_matrix = CallMatrix(probeset_ids=probeset_ids, sample_ids=sample_ids, calls=calls)
    truth = TruthRecord(
        spec=spec,
        informative_ids=[probeset_ids[gene.index] for gene in spec.informative],
        outliers=outliers,
    )
    logger.info(
        f"Generated {spec.genes} genes x {codes.size} samples, "
        f"{len(spec.informative)} planted, {len(outliers)} outliers (seed {spec.seed})"
    )
    return dataset, call_matrix, truth


def write_truth(truth: TruthRecord) -> str:
    """Serialize a truth record to JSON."""
    return truth.model_dump_json(indent=2) + "\n"


def read_truth(text: str) -> TruthRecord:
    """Parse a truth record.

    Raises:
        DataFormatError: When the document is not a valid truth record.
    """
    try:
        return TruthRecord.model_validate_json(text)
    except ValidationError as e:
        raise DataFormatError(f"invalid truth record: {e.errors()[0]['msg']}") from e
