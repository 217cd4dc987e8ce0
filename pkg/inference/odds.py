"""2x2 marginalization and the log marginal odds ratio."""

import math
from typing import Union

import numpy as np

from common.errors import ValidationError
from inference.models import BinaryPredicate, MarginalOddsSpec, ReplicateEstimate, TwoByTwo
from tables.models import ContingencyTable, RealTable, Schema


def _indices(schema: Schema, variable: str, labels) -> np.ndarray:
    return np.array([schema.category_index(variable, label) for label in labels], dtype=np.int64)


def _predicate_indices(schema: Schema, predicate: BinaryPredicate):
    schema.axis_of(predicate.variable)
    if not predicate.positive or not predicate.negative:
        raise ValidationError(
            f"Predicate on {predicate.variable!r} must map at least one category to each of 1 and 0"
        )
    return _indices(schema, predicate.variable, predicate.positive), _indices(
        schema, predicate.variable, predicate.negative
    )


def marginalize_2x2(table: Union[ContingencyTable, RealTable], spec: MarginalOddsSpec) -> TwoByTwo:
    """Sum cells into the 2x2 defined by the row/column predicates after applying the filters."""
    schema = table.table_schema
    cube = table.values.reshape(schema.shape)

    for name, labels in spec.filters.items():
        if not labels:
            raise ValidationError(f"Filter on {name!r} keeps no categories")
        cube = np.take(cube, _indices(schema, name, labels), axis=schema.axis_of(name))

    row_axis, col_axis = schema.axis_of(spec.row.variable), schema.axis_of(spec.col.variable)
    others = tuple(axis for axis in range(len(schema.shape)) if axis not in (row_axis, col_axis))
    margin = cube.sum(axis=others) if others else cube
    if row_axis > col_axis:
        margin = margin.T

    row_pos, row_neg = _predicate_indices(schema, spec.row)
    col_pos, col_neg = _predicate_indices(schema, spec.col)

    def cell(rows, cols) -> float:
        return float(margin[np.ix_(rows, cols)].sum())

    return TwoByTwo(
        n11=cell(row_pos, col_pos),
        n10=cell(row_pos, col_neg),
        n01=cell(row_neg, col_pos),
        n00=cell(row_neg, col_neg),
    )


def log_odds_ratio(t: TwoByTwo, correction: float = 0.0) -> ReplicateEstimate:
    """q = log((n11+c)(n00+c) / ((n10+c)(n01+c))), v = Σ 1/(n_ij + c)."""
    if correction < 0:
        raise ValidationError("correction must be nonnegative")
    cells = [t.n11 + correction, t.n10 + correction, t.n01 + correction, t.n00 + correction]
    if min(cells) <= 0:
        raise ValidationError("2x2 table has a zero cell; pass correction=0.5 (Haldane-Anscombe) to proceed")
    n11, n10, n01, n00 = cells
    q = math.log(n11) + math.log(n00) - math.log(n10) - math.log(n01)
    v = math.fsum(1.0 / c for c in cells)
    return ReplicateEstimate(q=q, v=v)
