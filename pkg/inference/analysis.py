"""Running the log-odds-ratio analysis on original data and on synthetic ensembles."""

from typing import Literal, Optional

import numpy as np
from loguru import logger

from common.errors import ValidationError
from inference.combining import combine_tp, combine_ts, interval_from_estimate
from inference.models import CombinedEstimate, MarginalOddsSpec
from inference.odds import log_odds_ratio, marginalize_2x2
from synthesis.models import SyntheticEnsemble
from tables.ensemble_ops import average_ensemble
from tables.models import ContingencyTable
from utility.models import IntervalEstimate


def analyze_original(
    table: ContingencyTable, spec: MarginalOddsSpec, level: float = 0.95, correction: float = 0.0
) -> IntervalEstimate:
    """Original-data estimate with its normal-reference interval."""
    estimate = log_odds_ratio(marginalize_2x2(table, spec), correction)
    return interval_from_estimate(estimate.q, estimate.v, level)


def analyze_ensemble(
    ensemble: SyntheticEnsemble,
    spec: MarginalOddsSpec,
    mode: Literal["separate", "averaged"] = "separate",
    estimator: Optional[Literal["Tp", "Ts"]] = None,
    level: float = 0.95,
    correction: float = 0.0,
    n: Optional[float] = None,
) -> CombinedEstimate:
    """Analyse each replicate and combine with T_p, or analyse the averaged table with T_s."""
    estimator = estimator or ("Tp" if mode == "separate" else "Ts")
    if mode == "separate":
        if estimator != "Tp":
            raise ValidationError("mode 'separate' combines with T_p")
        if ensemble.m < 2:
            raise ValidationError("mode 'separate' needs m >= 2; use mode 'averaged' with T_s for m = 1")
        estimates = []
        for index in range(ensemble.m):
            replicate = ContingencyTable(
                schema=ensemble.table_schema,
                counts=ensemble.replicate(index),
                structural_zero_mask=ensemble.structural_zero_mask,
            )
            estimates.append(log_odds_ratio(marginalize_2x2(replicate, spec), correction))
        return combine_tp(estimates, level)

    if mode != "averaged":
        raise ValidationError(f"Unknown mode {mode!r}; use 'separate' or 'averaged'")
    if estimator != "Ts":
        raise ValidationError("mode 'averaged' combines with T_s")
    n = ensemble.original_n if n is None else n
    if n is None:
        raise ValidationError("T_s needs the original sample size n; the ensemble does not record it")

    averaged = average_ensemble(ensemble)
    estimate = log_odds_ratio(marginalize_2x2(averaged, spec), correction)
    n_syn = np.asarray(ensemble.n_syn, dtype=np.float64)
    n_syn_mean = float(n_syn.mean())
    if ensemble.m > 1 and n_syn_mean > 0:
        spread = float((n_syn.max() - n_syn.min()) / n_syn_mean)
        logger.debug(f"T_s assumes constant n_syn; relative spread across replicates is {spread:.3%}")
    return combine_ts(estimate.v, estimate.q, ensemble.m, n_syn_mean, float(n), level)
