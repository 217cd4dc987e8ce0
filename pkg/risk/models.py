"""Models for τ disclosure-risk metrics."""

from typing import Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from tables.models import TauSpectrum


class TauBandQuery(BaseModel):
    """One (k, d) band evaluated under synthesis with (sigma, m)."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=0)
    d: float = Field(ge=0, allow_inf_nan=False)
    sigma: float = Field(ge=0, allow_inf_nan=False)
    m: int = Field(ge=1)
    alpha: float = Field(0.0, ge=0)


class TauReport(BaseModel):
    """τ₁/τ₂ spectra plus τ₃/τ₄ per "k:d" band; None marks an undefined metric."""

    tau1: Optional[TauSpectrum] = None
    tau2: TauSpectrum
    tau3: Dict[str, Optional[float]]
    tau4: Dict[str, Optional[float]]
    mode: Literal["empirical", "analytic"]
    sigma: Optional[float] = None
    m: Optional[int] = None

    @field_validator("tau3", "tau4")
    @classmethod
    def _check_probabilities(cls, value: Dict[str, Optional[float]]) -> Dict[str, Optional[float]]:
        for key, p in value.items():
            if p is not None and not -1e-12 <= p <= 1.0 + 1e-12:
                raise ValueError(f"probability for band {key} is outside [0, 1]")
        return value

    def undefined_bands(self):
        return sorted({key for key, p in {**self.tau3, **self.tau4}.items() if p is None})
