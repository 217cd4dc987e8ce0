"""
Data models for multi-way contingency tables.

Cells are linearized row-major over the schema's declared variable and
category order; every package indexes cells through `Schema.shape`.
"""

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from common.errors import ValidationError
from common.utils import parse_spectrum_key

SPECTRUM_TOLERANCE = 1e-12
# published spectra are rounded; anything further off is a wrong input
RENORMALIZE_TOLERANCE = 1e-3


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class Variable(BaseModel):
    """A categorical variable and its ordered category labels."""

    model_config = ConfigDict(frozen=True)

    name: str
    categories: Tuple[str, ...]

    @field_validator("categories")
    @classmethod
    def _check_categories(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(value) < 2:
            raise ValueError("a variable needs at least 2 categories")
        if len(set(value)) != len(value):
            raise ValueError("category labels must be unique within a variable")
        return value


class Schema(BaseModel):
    """Ordered list of variables defining the table's cells."""

    model_config = ConfigDict(frozen=True)

    variables: Tuple[Variable, ...]

    @field_validator("variables")
    @classmethod
    def _check_variables(cls, value: Tuple[Variable, ...]) -> Tuple[Variable, ...]:
        if not value:
            raise ValueError("schema needs at least one variable")
        names = [v.name for v in value]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        return value

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, Sequence[str]]]) -> "Schema":
        return cls(variables=tuple(Variable(name=name, categories=tuple(cats)) for name, cats in pairs))

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.variables]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(len(v.categories) for v in self.variables)

    @property
    def K(self) -> int:
        return math.prod(self.shape)

    def axis_of(self, name: str) -> int:
        for axis, variable in enumerate(self.variables):
            if variable.name == name:
                return axis
        raise ValidationError(f"Unknown variable {name!r}; schema has {self.names}")

    def category_index(self, name: str, label: str) -> int:
        variable = self.variables[self.axis_of(name)]
        try:
            return variable.categories.index(label)
        except ValueError:
            raise ValidationError(f"Unknown category {label!r} for variable {name!r}") from None

    def cell_index(self, labels: Sequence[str]) -> int:
        """Row-major index of the cell identified by one label per variable."""
        if len(labels) != len(self.variables):
            raise ValidationError(f"Expected {len(self.variables)} labels, got {len(labels)}")
        coords = [self.category_index(v.name, label) for v, label in zip(self.variables, labels)]
        return int(np.ravel_multi_index(coords, self.shape))


class ContingencyTable(BaseModel):
    """K-cell integer count table with an optional structural-zero mask."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    table_schema: Schema = Field(alias="schema")
    counts: np.ndarray
    structural_zero_mask: Optional[np.ndarray] = None

    @field_validator("counts", mode="before")
    @classmethod
    def _coerce_counts(cls, value) -> np.ndarray:
        array = np.asarray(value)
        if array.ndim != 1:
            raise ValueError("counts must be a 1-D vector")
        if array.size and not np.issubdtype(array.dtype, np.integer):
            if not np.all(np.isfinite(array)) or not np.all(np.equal(np.mod(array, 1), 0)):
                raise ValueError("counts must be integers")
        array = array.astype(np.int64)
        if array.size and array.min() < 0:
            raise ValueError("counts must be nonnegative")
        return _frozen_array(array, np.int64)

    @field_validator("structural_zero_mask", mode="before")
    @classmethod
    def _coerce_mask(cls, value) -> Optional[np.ndarray]:
        if value is None:
            return None
        array = np.asarray(value, dtype=bool)
        if array.ndim != 1:
            raise ValueError("structural_zero_mask must be a 1-D vector")
        return _frozen_array(array, bool)

    @model_validator(mode="after")
    def _check_shape(self) -> "ContingencyTable":
        K = self.table_schema.K
        if self.counts.shape[0] != K:
            raise ValueError(f"counts has length {self.counts.shape[0]} but schema has K={K}")
        if self.structural_zero_mask is None:
            object.__setattr__(self, "structural_zero_mask", _frozen_array(np.zeros(K, dtype=bool), bool))
        elif self.structural_zero_mask.shape[0] != K:
            raise ValueError(f"structural_zero_mask has length {self.structural_zero_mask.shape[0]}, expected {K}")
        if np.any(self.counts[self.structural_zero_mask] != 0):
            raise ValueError("structural-zero cells must have count 0")
        return self

    @property
    def K(self) -> int:
        return int(self.counts.shape[0])

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def values(self) -> np.ndarray:
        """Counts as floats, so integer and real tables share metric code."""
        return self.counts.astype(np.float64)

    def sampling_zero_mask(self) -> np.ndarray:
        return (self.counts == 0) & ~self.structural_zero_mask


class RealTable(BaseModel):
    """K-cell table of nonnegative reals, e.g. mean synthetic counts."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    table_schema: Schema = Field(alias="schema")
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, value) -> np.ndarray:
        array = np.asarray(value, dtype=np.float64)
        if array.ndim != 1:
            raise ValueError("values must be a 1-D vector")
        if not np.all(np.isfinite(array)):
            raise ValueError("values must be finite")
        if array.size and array.min() < 0:
            raise ValueError("values must be nonnegative")
        return _frozen_array(array, np.float64)

    @model_validator(mode="after")
    def _check_shape(self) -> "RealTable":
        if self.values.shape[0] != self.table_schema.K:
            raise ValueError(f"values has length {self.values.shape[0]} but schema has K={self.table_schema.K}")
        return self

    @property
    def K(self) -> int:
        return int(self.values.shape[0])

    @property
    def total(self) -> float:
        return float(self.values.sum())

    @classmethod
    def from_table(cls, table: ContingencyTable) -> "RealTable":
        return cls(schema=table.table_schema, values=table.values)


class TauSpectrum(BaseModel):
    """Proportion of cells of each size k.

    When `tail_start` is set, `proportions[tail_start]` is the aggregated
    mass of every size >= tail_start (an open "k+" bucket).
    """

    model_config = ConfigDict(frozen=True)

    proportions: Dict[int, float]
    total_cells: int = Field(ge=1)
    tail_start: Optional[int] = None

    @field_validator("proportions")
    @classmethod
    def _check_proportions(cls, value: Dict[int, float]) -> Dict[int, float]:
        if not value:
            raise ValueError("spectrum needs at least one cell size")
        for k, p in value.items():
            if k < 0:
                raise ValueError(f"cell size {k} is negative")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"proportion for k={k} is outside [0, 1]")
        total = math.fsum(value.values())
        if abs(total - 1.0) > SPECTRUM_TOLERANCE:
            raise ValueError(f"proportions sum to {total!r}, expected 1")
        return dict(sorted(value.items()))

    @model_validator(mode="after")
    def _check_tail(self) -> "TauSpectrum":
        if self.tail_start is not None:
            if self.tail_start not in self.proportions:
                raise ValueError(f"tail_start {self.tail_start} has no proportion")
            if max(self.proportions) != self.tail_start:
                raise ValueError("the open tail must be the largest cell size")
        return self

    @classmethod
    def from_mapping(cls, mapping: Dict, total_cells: int, normalize: bool = False) -> "TauSpectrum":
        """Build from keys like 0, "1" or "6+"; optionally renormalize published, rounded proportions.

        Renormalizing only absorbs rounding: a sum more than RENORMALIZE_TOLERANCE
        away from 1 is rejected.
        """
        proportions: Dict[int, float] = {}
        tail_start = None
        for key, p in mapping.items():
            k, is_tail = parse_spectrum_key(key)
            if is_tail:
                if tail_start is not None:
                    raise ValidationError("a spectrum can have only one open tail")
                tail_start = k
            proportions[k] = proportions.get(k, 0.0) + float(p)
        if normalize:
            total = math.fsum(proportions.values())
            if total <= 0:
                raise ValidationError("spectrum proportions sum to zero")
            if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
                raise ValidationError(
                    f"spectrum proportions sum to {total!r}; only rounding within {RENORMALIZE_TOLERANCE} of 1 is renormalized"
                )
            if abs(total - 1.0) > SPECTRUM_TOLERANCE:
                logger.debug(f"Renormalizing spectrum that sums to {total!r}")
            proportions = {k: p / total for k, p in proportions.items()}
            # absorb the last ulp so the sum check holds exactly
            residual = 1.0 - math.fsum(proportions.values())
            largest = max(proportions, key=proportions.get)
            proportions[largest] += residual
        try:
            return cls(proportions=proportions, total_cells=total_cells, tail_start=tail_start)
        except ValueError as e:
            raise ValidationError(f"Invalid spectrum: {e}") from e

    def get(self, k: int) -> float:
        if self.tail_start is not None and k >= self.tail_start:
            raise ValidationError(f"τ({k}) lies inside the open tail {self.tail_start}+; expand the tail first")
        return self.proportions.get(k, 0.0)

    @property
    def max_size(self) -> int:
        return max(k for k, p in self.proportions.items() if p > 0) if any(self.proportions.values()) else 0

    def expand_tail(self, max_count: int) -> "TauSpectrum":
        """Spread the open-tail mass uniformly over tail_start..max_count."""
        if self.tail_start is None:
            return self
        if max_count < self.tail_start:
            raise ValidationError(f"max_count {max_count} is below the tail start {self.tail_start}")
        proportions = {k: p for k, p in self.proportions.items() if k != self.tail_start}
        mass = self.proportions[self.tail_start]
        width = max_count - self.tail_start + 1
        for k in range(self.tail_start, max_count + 1):
            proportions[k] = proportions.get(k, 0.0) + mass / width
        residual = 1.0 - math.fsum(proportions.values())
        proportions[max(proportions, key=proportions.get)] += residual
        return TauSpectrum(proportions=proportions, total_cells=self.total_cells)

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        keys = np.array(list(self.proportions.keys()), dtype=np.int64)
        probs = np.array(list(self.proportions.values()), dtype=np.float64)
        return keys, probs

    def to_json_dict(self) -> Dict:
        proportions = {
            (f"{k}+" if k == self.tail_start else str(k)): p for k, p in self.proportions.items()
        }
        return {"proportions": proportions, "total_cells": self.total_cells}
