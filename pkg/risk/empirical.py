"""
Empirical τ metrics between an original table and (averaged) synthetic values.

Bands are closed: a synthetic value v is "within d of k" when |v - k| <= d.
Conditional metrics with an empty conditioning set return None.
"""

from typing import Optional

import numpy as np

from common.errors import ValidationError
from tables.models import ContingencyTable, RealTable

# absorbs float error in averages of integers (e.g. 11/10 - 1 > 0.1 in binary)
TIE_TOLERANCE = 1e-9


def _check_pair(original: ContingencyTable, averaged: RealTable) -> None:
    if original.table_schema != averaged.table_schema:
        raise ValidationError("Original and synthetic tables must share one schema")


def _check_band(k: int, d: float) -> None:
    if k < 0:
        raise ValidationError(f"k must be nonnegative, got {k}")
    if not d >= 0:
        raise ValidationError(f"d must be nonnegative, got {d}")


def band_mask(values: np.ndarray, k: int, d: float) -> np.ndarray:
    return np.abs(values - k) <= d + TIE_TOLERANCE


def tau1_band(averaged: RealTable, k: int, d: float) -> float:
    """Proportion of synthetic cells within d of k."""
    _check_band(k, d)
    return int(band_mask(averaged.values, k, d).sum()) / averaged.K


def tau3_empirical(original: ContingencyTable, averaged: RealTable, k: int, d: float) -> Optional[float]:
    """Share of original k-cells synthesized to within d of k."""
    _check_pair(original, averaged)
    _check_band(k, d)
    source = original.counts == k
    total = int(source.sum())
    if total == 0:
        return None
    hits = int((source & band_mask(averaged.values, k, d)).sum())
    return hits / total


def tau4_empirical(original: ContingencyTable, averaged: RealTable, k: int, d: float) -> Optional[float]:
    """Share of synthetic values within d of k that came from an original k-cell."""
    _check_pair(original, averaged)
    _check_band(k, d)
    in_band = band_mask(averaged.values, k, d)
    total = int(in_band.sum())
    if total == 0:
        return None
    hits = int((in_band & (original.counts == k)).sum())
    return hits / total
