"""Microdata to contingency-table aggregation."""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from common.errors import ValidationError
from tables.models import ContingencyTable, Schema


def aggregate_microdata(records: Sequence[Sequence[str]], schema: Schema) -> ContingencyTable:
    """Tally records (one label per schema variable) into a row-major count table."""
    lookups: List[Dict[str, int]] = [
        {label: i for i, label in enumerate(v.categories)} for v in schema.variables
    ]
    p = len(lookups)
    coords = np.empty((p, len(records)), dtype=np.int64)

    for row, record in enumerate(records):
        if len(record) != p:
            raise ValidationError(f"Record {row} has {len(record)} labels; schema has {p} variables")
        for axis, label in enumerate(record):
            try:
                coords[axis, row] = lookups[axis][label]
            except KeyError:
                variable = schema.variables[axis].name
                raise ValidationError(
                    f"Record {row}: unknown category {label!r} for variable {variable!r}"
                ) from None

    if records:
        flat = np.ravel_multi_index(tuple(coords), schema.shape)
        counts = np.bincount(flat, minlength=schema.K)
    else:
        counts = np.zeros(schema.K, dtype=np.int64)
    logger.debug(f"Aggregated {len(records)} records into {schema.K} cells")
    return ContingencyTable(schema=schema, counts=counts)


def infer_schema(frame: pd.DataFrame) -> Schema:
    """Schema with each column's categories in sorted order."""
    pairs = []
    for column in frame.columns:
        categories = sorted(frame[column].unique().tolist())
        if len(categories) < 2:
            raise ValidationError(f"Column {column!r} has fewer than 2 distinct categories; pass an explicit schema")
        pairs.append((column, categories))
    return Schema.from_pairs(pairs)


def load_microdata_csv(path: str, schema: Optional[Schema] = None) -> Tuple[ContingencyTable, Schema]:
    """Read a header-row CSV of categorical records and aggregate it."""
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    if schema is None:
        schema = infer_schema(frame)
    else:
        missing = [name for name in schema.names if name not in frame.columns]
        if missing:
            raise ValidationError(f"CSV {path} is missing schema columns {missing}")
        frame = frame[schema.names]
    records = list(frame.itertuples(index=False, name=None))
    logger.info(f"Read {len(records)} records from {path}")
    return aggregate_microdata(records, schema), schema
