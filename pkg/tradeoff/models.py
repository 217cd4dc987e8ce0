"""Models for the risk-utility trade-off grid."""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

DEFAULT_SIGMAS = [0.0, 0.1, 0.5, 2.0, 10.0]
DEFAULT_MS = [1, 2, 5, 10, 20, 30, 40, 50]


class GridSpec(BaseModel):
    """The (m, sigma) grid, the metrics to evaluate on it and the seeding of its jobs."""

    model_config = ConfigDict(frozen=True)

    sigmas: List[float] = Field(default_factory=lambda: list(DEFAULT_SIGMAS))
    ms: List[int] = Field(default_factory=lambda: list(DEFAULT_MS))
    bands: List[Tuple[int, float]] = Field(default_factory=lambda: [(1, 0.5)])
    risk_metric: Literal["tau3", "tau4"] = "tau4"
    utility_metric: Optional[Literal["hellinger", "euclidean", "ci_overlap"]] = "hellinger"
    replications: int = Field(1, ge=1)
    master_seed: int = Field(0, ge=0, lt=2**64)
    alpha: float = Field(0.0, ge=0)
    size_factor: float = Field(1.0, gt=0)
    analysis_mode: Literal["separate", "averaged"] = "separate"
    level: float = Field(0.95, gt=0, lt=1)
    correction: float = Field(0.0, ge=0)  # added to every 2x2 cell before the log-odds ratio
    truncation: Optional[int] = Field(None, ge=1)
    lattice_correction: bool = False
    include_zero_cells: bool = False

    @field_validator("sigmas")
    @classmethod
    def _check_sigmas(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("sigmas must not be empty")
        if any(s < 0 for s in value):
            raise ValueError("sigmas must be nonnegative")
        return sorted(set(value))

    @field_validator("ms")
    @classmethod
    def _check_ms(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("ms must not be empty")
        if any(m < 1 for m in value):
            raise ValueError("ms must be positive")
        return sorted(set(value))

    @field_validator("bands")
    @classmethod
    def _check_bands(cls, value: List[Tuple[int, float]]) -> List[Tuple[int, float]]:
        if not value:
            raise ValueError("bands must not be empty")
        for k, d in value:
            if k < 0 or d < 0:
                raise ValueError(f"band ({k}, {d}) needs k >= 0 and d >= 0")
        return value


class TradeoffPoint(BaseModel):
    """Risk and (standardized) utility at one (m, sigma, k, d) grid point."""

    model_config = ConfigDict(frozen=True)

    m: int
    sigma: float
    k: int
    d: float
    risk: Optional[float] = Field(None, ge=0, le=1)  # None: undefined for this band
    risk_se: Optional[float] = None
    utility: Optional[float] = Field(None, ge=0, le=1)
    utility_se: Optional[float] = None
    utility_raw: Optional[float] = None
    provenance: Literal["empirical", "analytic"]

    def to_row(self) -> Dict:
        return self.model_dump()
