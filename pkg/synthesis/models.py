"""
Models for the (sigma, alpha) synthesis mechanism.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tables.models import Schema


class SynthesisParams(BaseModel):
    """Tuning parameters of one synthesis run."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(ge=0, allow_inf_nan=False)  # NBI dispersion
    alpha: float = Field(0.0, ge=0, allow_inf_nan=False)  # pseudocount mean for sampling zeros
    m: int = Field(1, ge=1)
    size_factor: float = Field(1.0, gt=0, allow_inf_nan=False)  # E(n_syn) / n
    master_seed: int = Field(0, ge=0, lt=2**64)


class SyntheticEnsemble(BaseModel):
    """m synthetic replicates of one original table."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)

    table_schema: Schema = Field(alias="schema")
    replicates: np.ndarray  # shape (m, K)
    params: SynthesisParams
    structural_zero_mask: Optional[np.ndarray] = None
    original_n: Optional[int] = None

    @field_validator("replicates", mode="before")
    @classmethod
    def _coerce_replicates(cls, value) -> np.ndarray:
        array = np.asarray(value)
        if array.ndim != 2:
            raise ValueError("replicates must be an (m, K) matrix")
        if array.size and array.min() < 0:
            raise ValueError("synthetic counts must be nonnegative")
        if array.size and array.max() > np.iinfo(np.int32).max:
            raise ValueError("synthetic counts must fit in int32")
        array = np.array(array, dtype=np.int32, copy=True)
        array.setflags(write=False)
        return array

    @field_validator("structural_zero_mask", mode="before")
    @classmethod
    def _coerce_mask(cls, value) -> Optional[np.ndarray]:
        if value is None:
            return None
        array = np.array(value, dtype=bool, copy=True)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_shape(self) -> "SyntheticEnsemble":
        m, K = self.replicates.shape
        if K != self.table_schema.K:
            raise ValueError(f"replicates have {K} cells but schema has K={self.table_schema.K}")
        if m != self.params.m:
            raise ValueError(f"ensemble holds {m} replicates but params.m={self.params.m}")
        if self.structural_zero_mask is None:
            mask = np.zeros(K, dtype=bool)
            mask.setflags(write=False)
            object.__setattr__(self, "structural_zero_mask", mask)
        elif self.structural_zero_mask.shape != (K,):
            raise ValueError("structural_zero_mask must have length K")
        if np.any(self.replicates[:, self.structural_zero_mask] != 0):
            raise ValueError("structural-zero cells must be 0 in every replicate")
        return self

    @property
    def m(self) -> int:
        return int(self.replicates.shape[0])

    @property
    def K(self) -> int:
        return int(self.replicates.shape[1])

    @property
    def n_syn(self) -> List[int]:
        return [int(total) for total in self.replicates.sum(axis=1, dtype=np.int64)]

    def replicate(self, index: int) -> np.ndarray:
        return self.replicates[index]
