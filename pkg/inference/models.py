"""Models for the analyst-side log-odds-ratio analysis and combining rules."""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from utility.models import IntervalEstimate


class BinaryPredicate(BaseModel):
    """Maps the categories of one variable to 1 (positive) or 0 (negative); others are filtered out."""

    model_config = ConfigDict(frozen=True)

    variable: str
    positive: List[str]
    negative: List[str]

    @model_validator(mode="after")
    def _check_disjoint(self) -> "BinaryPredicate":
        overlap = set(self.positive) & set(self.negative)
        if overlap:
            raise ValueError(f"categories {sorted(overlap)} are both positive and negative for {self.variable!r}")
        return self


class MarginalOddsSpec(BaseModel):
    """A 2x2 marginal of the table: row and column predicates plus category filters on other variables."""

    model_config = ConfigDict(frozen=True)

    row: BinaryPredicate
    col: BinaryPredicate
    filters: Dict[str, List[str]] = {}

    @model_validator(mode="after")
    def _check_variables(self) -> "MarginalOddsSpec":
        if self.row.variable == self.col.variable:
            raise ValueError("row and column predicates must use different variables")
        for name in (self.row.variable, self.col.variable):
            if name in self.filters:
                raise ValueError(f"{name!r} is already restricted by its predicate; drop it from filters")
        return self


class TwoByTwo(BaseModel):
    """n11 = (row 1, col 1), n10 = (row 1, col 0), n01 = (row 0, col 1), n00 = (row 0, col 0)."""

    model_config = ConfigDict(frozen=True)

    n11: float = Field(ge=0)
    n10: float = Field(ge=0)
    n01: float = Field(ge=0)
    n00: float = Field(ge=0)

    @property
    def total(self) -> float:
        return self.n11 + self.n10 + self.n01 + self.n00


class ReplicateEstimate(BaseModel):
    """Point estimate q and variance estimate v from one data set."""

    model_config = ConfigDict(frozen=True)

    q: float = Field(allow_inf_nan=False)
    v: float = Field(ge=0, allow_inf_nan=False)
    n_syn: Optional[float] = None


class CombinedEstimate(BaseModel):
    """Result of a combining rule over m synthetic data sets."""

    q_bar: float
    b_m: Optional[float] = Field(None, ge=0)
    v_bar: float = Field(ge=0)
    variance: float = Field(ge=0)
    dof: float = Field(gt=0)  # inf for a normal reference
    interval: IntervalEstimate
    estimator: Literal["Tp", "Ts"]
    mode: Literal["separate", "averaged"]
    m: int = Field(ge=1)
    n_syn: Optional[float] = None
    n: Optional[float] = None

    @field_validator("dof")
    @classmethod
    def _check_dof(cls, value: float) -> float:
        if value != value:
            raise ValueError("dof is NaN")
        return value

    def to_row(self) -> Dict:
        return {
            "q_bar": self.q_bar,
            "b_m": self.b_m,
            "v_bar": self.v_bar,
            "variance": self.variance,
            "dof": self.dof,
            "lower": self.interval.lower,
            "upper": self.interval.upper,
            "level": self.interval.level,
            "estimator": self.estimator,
            "mode": self.mode,
            "m": self.m,
        }
