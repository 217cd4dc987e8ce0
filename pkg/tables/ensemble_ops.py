"""Averaging and pooling synthetic ensembles into a single table."""

from typing import TYPE_CHECKING

import numpy as np

from common.errors import ValidationError
from tables.models import ContingencyTable, RealTable

if TYPE_CHECKING:
    from synthesis.models import SyntheticEnsemble


def _check_nonempty(ensemble: "SyntheticEnsemble") -> None:
    if ensemble is None or ensemble.m < 1:
        raise ValidationError("Ensemble has no replicates")


def average_ensemble(ensemble: "SyntheticEnsemble") -> RealTable:
    """Mean synthetic count per cell, (1/m) Σ_l f_l."""
    _check_nonempty(ensemble)
    values = ensemble.replicates.sum(axis=0, dtype=np.int64) / ensemble.m
    return RealTable(schema=ensemble.table_schema, values=values)


def pool_ensemble(ensemble: "SyntheticEnsemble") -> ContingencyTable:
    """Cell-wise sum of all replicates."""
    _check_nonempty(ensemble)
    counts = ensemble.replicates.sum(axis=0, dtype=np.int64)
    return ContingencyTable(schema=ensemble.table_schema, counts=counts, structural_zero_mask=ensemble.structural_zero_mask)
