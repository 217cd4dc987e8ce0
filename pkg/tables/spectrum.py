"""τ spectra: the proportion of cells holding each count."""

from typing import Literal, Union

import numpy as np

from common.errors import ValidationError
from tables.models import ContingencyTable, RealTable, TauSpectrum

Binning = Literal["exact", "unit-rounded"]


def _round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(values + 0.5)


def tau_spectrum(table: Union[ContingencyTable, RealTable], binning: Binning = "exact") -> TauSpectrum:
    """Proportion of the K cells at each size k.

    Built from an original table this is τ₂; from a synthetic table, τ₁.
    Real tables need `unit-rounded` binning unless every value is integral.
    """
    if binning not in ("exact", "unit-rounded"):
        raise ValidationError(f"Unknown binning {binning!r}; use 'exact' or 'unit-rounded'")
    if isinstance(table, ContingencyTable):
        sizes = table.counts
    else:
        values = table.values
        if binning == "exact":
            if not np.all(values == np.floor(values)):
                raise ValidationError("Real table has non-integer values; use binning='unit-rounded'")
            sizes = values.astype(np.int64)
        else:
            sizes = _round_half_up(values).astype(np.int64)

    K = int(sizes.shape[0])
    tallies = np.bincount(sizes)
    present = np.flatnonzero(tallies)
    proportions = {int(k): int(tallies[k]) / K for k in present}
    return TauSpectrum.from_mapping(proportions, total_cells=K, normalize=True)
