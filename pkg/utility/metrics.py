"""
Utility measures between original and synthetic tables: percentage
differences, Hellinger and Euclidean distances, confidence-interval overlap.
"""

from collections import defaultdict
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from common.errors import ValidationError
from common.utils import format_number
from tables.models import ContingencyTable, RealTable
from utility.models import IntervalEstimate, UtilityReport

TableLike = Union[ContingencyTable, RealTable]

DEFAULT_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def _pair_values(first: TableLike, second: TableLike) -> Tuple[np.ndarray, np.ndarray]:
    if first.table_schema != second.table_schema:
        raise ValidationError("Tables must share one schema")
    return first.values, second.values


def percent_differences(
    original: ContingencyTable,
    synthetic: TableLike,
    min_count: int = 1,
    stratify: bool = False,
) -> Union[List[float], Dict[int, List[float]]]:
    """100·(f̄syn − f)/f for cells with f >= min_count; optionally grouped by f."""
    if min_count < 1:
        raise ValidationError("min_count must be >= 1 (zero cells have no percentage difference)")
    f, synth = _pair_values(original, synthetic)
    keep = original.counts >= min_count
    diffs = 100.0 * (synth[keep] - f[keep]) / f[keep]
    if not stratify:
        return diffs.tolist()
    grouped: Dict[int, List[float]] = defaultdict(list)
    for count, diff in zip(original.counts[keep].tolist(), diffs.tolist()):
        grouped[count].append(diff)
    return dict(sorted(grouped.items()))


def hellinger(
    original: TableLike, synthetic: TableLike, basis: Literal["counts", "probabilities"] = "counts"
) -> float:
    """(1/√2)·‖√f − √f̄syn‖₂, on raw counts or on normalized probabilities."""
    p, q = _pair_values(original, synthetic)
    if basis == "probabilities":
        p_total, q_total = p.sum(), q.sum()
        if p_total == 0 or q_total == 0:
            raise ValidationError("Hellinger on probabilities needs tables with a positive total")
        p, q = p / p_total, q / q_total
    elif basis != "counts":
        raise ValidationError(f"Unknown basis {basis!r}; use 'counts' or 'probabilities'")
    return float(np.sqrt(np.sum(np.square(np.sqrt(p) - np.sqrt(q)))) / np.sqrt(2.0))


def euclidean(original: TableLike, synthetic: TableLike) -> float:
    p, q = _pair_values(original, synthetic)
    return float(np.linalg.norm(p - q))


def ci_overlap(original: IntervalEstimate, synthetic: IntervalEstimate) -> float:
    """Average share of each interval covered by their intersection, floored at 0.

    Zero-length intervals use the limiting values: a point inside the other
    interval counts as fully covered.
    """
    if not np.isclose(original.level, synthetic.level):
        raise ValidationError("Intervals must share one confidence level")
    intersection = max(0.0, min(original.upper, synthetic.upper) - max(original.lower, synthetic.lower))
    shares = []
    for own, other in ((original, synthetic), (synthetic, original)):
        if own.length > 0:
            shares.append(intersection / own.length)
        else:
            shares.append(1.0 if other.lower <= own.point <= other.upper else 0.0)
    if original.length == 0 and synthetic.length == 0:
        return 1.0 if original.point == synthetic.point else 0.0
    return float(min(1.0, 0.5 * (shares[0] + shares[1])))


def utility_report(
    original: ContingencyTable,
    synthetic: TableLike,
    quantiles: Sequence[float] = DEFAULT_QUANTILES,
    ci_pair: Optional[Tuple[IntervalEstimate, IntervalEstimate]] = None,
    sigma: Optional[float] = None,
    m: Optional[int] = None,
) -> UtilityReport:
    diffs = np.asarray(percent_differences(original, synthetic))
    pct = {}
    if diffs.size:
        pct = {format_number(q): float(np.quantile(diffs, q)) for q in quantiles}
    return UtilityReport(
        hellinger=hellinger(original, synthetic),
        euclidean=euclidean(original, synthetic),
        pct_diff_quantiles=pct,
        ci_overlap=ci_overlap(*ci_pair) if ci_pair else None,
        sigma=sigma,
        m=m,
    )
