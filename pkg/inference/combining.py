"""
Combining rules for inference from m synthetic data sets.

T_p (analyse each replicate, then combine):
    q̄_m = mean q^(l),  b_m = sample variance of q^(l),  v̄_m = mean v^(l)
    T_p = b_m/m + v̄_m, reference t with ν_p = (m−1)(1 + m·v̄_m/b_m)² dof
T_s (completely synthesized data, valid from m = 1):
    T_s = v̄_m·(n_syn/n + 1/m), normal reference
"""

import math
from typing import Sequence

import numpy as np
from loguru import logger
from scipy import stats

from common.errors import ValidationError
from inference.models import CombinedEstimate, ReplicateEstimate
from utility.models import IntervalEstimate


def _check_level(level: float) -> None:
    if not 0 < level < 1:
        raise ValidationError(f"level must be in (0, 1), got {level}")


def interval_from_estimate(q: float, variance: float, level: float = 0.95, dof: float = math.inf) -> IntervalEstimate:
    """q ± quantile·√variance under a t(dof) reference (normal when dof is infinite)."""
    _check_level(level)
    tail = (1.0 + level) / 2.0
    quantile = stats.norm.ppf(tail) if math.isinf(dof) else stats.t.ppf(tail, dof)
    half = float(quantile) * math.sqrt(variance)
    return IntervalEstimate(point=q, lower=q - half, upper=q + half, level=level)


def combine_tp(estimates: Sequence[ReplicateEstimate], level: float = 0.95) -> CombinedEstimate:
    m = len(estimates)
    if m < 2:
        raise ValidationError("T_p needs m >= 2 replicates (b_m is a sample variance); use T_s for m = 1")
    q = np.array([e.q for e in estimates], dtype=np.float64)
    v = np.array([e.v for e in estimates], dtype=np.float64)
    q_bar = float(q.mean())
    b_m = float(q.var(ddof=1))
    v_bar = float(v.mean())
    variance = b_m / m + v_bar
    if b_m == 0:
        dof = math.inf
    else:
        dof = (m - 1) * (1.0 + m * v_bar / b_m) ** 2
    logger.debug(f"T_p: m={m}, q̄={q_bar:.6g}, b_m={b_m:.6g}, v̄={v_bar:.6g}, ν_p={dof:.6g}")
    return CombinedEstimate(
        q_bar=q_bar,
        b_m=b_m,
        v_bar=v_bar,
        variance=variance,
        dof=dof,
        interval=interval_from_estimate(q_bar, variance, level, dof),
        estimator="Tp",
        mode="separate",
        m=m,
    )


def combine_ts(
    v_bar: float, q_bar: float, m: int, n_syn: float, n: float, level: float = 0.95
) -> CombinedEstimate:
    if n <= 0:
        raise ValidationError(f"n must be positive, got {n}")
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if v_bar < 0:
        raise ValidationError("v_bar must be nonnegative")
    variance = v_bar * (n_syn / n + 1.0 / m)
    return CombinedEstimate(
        q_bar=q_bar,
        b_m=None,
        v_bar=v_bar,
        variance=variance,
        dof=math.inf,
        interval=interval_from_estimate(q_bar, variance, level),
        estimator="Ts",
        mode="averaged",
        m=m,
        n_syn=n_syn,
        n=n,
    )
