"""Models for utility measures."""

from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class IntervalEstimate(BaseModel):
    """A point estimate with a confidence interval."""

    model_config = ConfigDict(frozen=True)

    point: float = Field(allow_inf_nan=False)
    lower: float = Field(allow_inf_nan=False)
    upper: float = Field(allow_inf_nan=False)
    level: float = Field(0.95, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_order(self) -> "IntervalEstimate":
        if not self.lower <= self.point <= self.upper:
            raise ValueError(f"interval must satisfy lower <= point <= upper, got ({self.lower}, {self.point}, {self.upper})")
        return self

    @property
    def length(self) -> float:
        return self.upper - self.lower


class UtilityReport(BaseModel):
    """General utility of a synthetic table against the original."""

    hellinger: float = Field(ge=0)
    euclidean: float = Field(ge=0)
    pct_diff_quantiles: Dict[str, float] = {}
    ci_overlap: Optional[float] = Field(None, ge=0, le=1)
    sigma: Optional[float] = None
    m: Optional[int] = None
