"""Multiple-testing adjustments.

All three return adjusted values in the original order, capped at 1, and preserve the
ordering of the raw p-values.
"""

from typing import Sequence

import numpy as np

from app.exception import InvalidParameterError


def _validated(raw_p: Sequence[float]) -> np.ndarray:
    p = np.asarray(raw_p, dtype=float)
    if p.ndim != 1:
        raise InvalidParameterError("p-values must be a flat list")
    if np.any(~np.isfinite(p)) or np.any(p <= 0) or np.any(p > 1):
        raise InvalidParameterError("p-values must lie in (0, 1]")
    return p


def _step_up(p: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
    """Sort ascending, scale the i-th smallest by multipliers[i], take the running min from the top."""
    order = np.argsort(p, kind="stable")
    scaled = p[order] * multipliers
    stepped = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted = np.empty_like(p)
    adjusted[order] = np.minimum(stepped, 1.0)
    return adjusted


def adjust_bh(raw_p: Sequence[float]) -> np.ndarray:
    """Benjamini-Hochberg false discovery rate: q_(i) = min over j >= i of m p_(j) / j."""
    p = _validated(raw_p)
    m = p.size
    if m == 0:
        return p
    return _step_up(p, m / np.arange(1, m + 1))


def adjust_bonferroni(raw_p: Sequence[float]) -> np.ndarray:
    """Bonferroni family-wise error rate: min(m p, 1)."""
    p = _validated(raw_p)
    return np.minimum(p * p.size, 1.0)


def adjust_hochberg(raw_p: Sequence[float]) -> np.ndarray:
    """Hochberg step-up family-wise error rate: h_(i) = min over j >= i of (m - j + 1) p_(j)."""
    p = _validated(raw_p)
    m = p.size
    if m == 0:
        return p
    return _step_up(p, (m - np.arange(m)).astype(float))
