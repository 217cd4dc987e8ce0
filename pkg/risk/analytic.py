"""
Analytic τ metrics under saturated NBI synthesis with alpha = 0.

For an original count k, the mean of m synthetic draws has mean k and
variance (k + σk²)/m; by the CLT it is approximately normal, giving

    τ₃(k, d) ≈ 2Φ(d / √((k + σk²)/m)) − 1

and τ₄(k, d) by Bayes over the τ₂ spectrum. m = 1, d = 0 quantities are
exact from the NBI pmf.
"""

import math
from typing import Optional

import numpy as np
from loguru import logger
from scipy import stats

from common.errors import ValidationError
from risk.models import TauBandQuery
from synthesis.nbi import nbi_pmf
from tables.models import TauSpectrum


def _reject_alpha(alpha: float) -> None:
    if alpha > 0:
        raise ValidationError("Analytic τ metrics assume alpha = 0; use empirical metrics when alpha > 0")


def _effective_d(query: TauBandQuery, lattice_correction: bool) -> float:
    # an average of m integer draws lives on a 1/m lattice
    return query.d + 0.5 / query.m if lattice_correction else query.d


def _sd(i, sigma: float, m: int):
    return np.sqrt((i + sigma * np.square(i)) / m)


def _interval_mass(lo, hi, scale) -> np.ndarray:
    """P(lo <= Z*scale <= hi) for standard normal Z, accurate in both tails."""
    lo = np.asarray(lo, dtype=np.float64) / scale
    hi = np.asarray(hi, dtype=np.float64) / scale
    upper = stats.norm.sf(lo) - stats.norm.sf(hi)
    lower = stats.norm.cdf(hi) - stats.norm.cdf(lo)
    return np.where(lo > 0, upper, lower)


def tau3_analytic(query: TauBandQuery, lattice_correction: bool = False) -> float:
    """CLT approximation of P(|f̄syn − k| <= d) for an original k-cell."""
    _reject_alpha(query.alpha)
    if query.k < 1:
        raise ValidationError("tau3_analytic needs k >= 1; zero cells stay zero exactly when alpha = 0")
    d = _effective_d(query, lattice_correction)
    if d == 0:
        return 0.0
    z = d / float(_sd(query.k, query.sigma, query.m))
    return float(1.0 - 2.0 * stats.norm.sf(z))


def tau4_analytic(
    query: TauBandQuery,
    tau2: TauSpectrum,
    truncation: Optional[int] = None,
    include_zero_cells: bool = False,
    lattice_correction: bool = False,
) -> Optional[float]:
    """CLT approximation of P(original = k | synthetic mean within d of k).

    The denominator sums i = 1..truncation over the τ₂ spectrum; an open
    spectrum tail is spread uniformly up to `truncation`. With
    `include_zero_cells`, zero cells (which stay exactly 0) add τ₂(0)·1{k <= d}.
    Returns None when the denominator is zero.
    """
    _reject_alpha(query.alpha)
    if tau2.tail_start is not None:
        if truncation is None:
            raise ValidationError("A spectrum with an open tail needs an explicit truncation")
        tau2 = tau2.expand_tail(truncation)
    support = tau2.max_size
    if truncation is None:
        truncation = support
    if truncation < support:
        raise ValidationError(f"truncation {truncation} is below the largest cell size {support} with τ₂ > 0")

    tau2_k = tau2.get(query.k)
    if tau2_k == 0:
        return 0.0
    numerator = tau3_analytic(query, lattice_correction) * tau2_k

    d = _effective_d(query, lattice_correction)
    sizes = np.arange(1, truncation + 1, dtype=np.float64)
    weights = np.array([tau2.get(int(i)) for i in sizes])
    keep = weights > 0
    sizes, weights = sizes[keep], weights[keep]
    offsets = query.k - sizes
    masses = _interval_mass(offsets - d, offsets + d, _sd(sizes, query.sigma, query.m))
    # the k-term must match the numerator's symmetric form exactly
    masses = np.where(sizes == query.k, numerator / tau2_k, masses)
    denominator = math.fsum(masses * weights)
    if include_zero_cells and query.k <= d:
        denominator += tau2.get(0)
    if denominator <= 0:
        logger.debug(f"tau4_analytic undefined for k={query.k}, d={query.d}: empty denominator")
        return None
    return float(min(1.0, numerator / denominator))


def tau3_exact_m1(k: int, sigma: float) -> float:
    """Exact τ₃(k) for a single replicate: P(NBI(k, σ) = k)."""
    if k < 1:
        raise ValidationError("tau3_exact_m1 needs k >= 1")
    return nbi_pmf(k, k, sigma)


def tau4_exact_m1(k: int, sigma: float, tau2: TauSpectrum, truncation: Optional[int] = None) -> Optional[float]:
    """Exact τ₄(k) for a single replicate: Bayes over the τ₂ spectrum with NBI likelihoods."""
    if tau2.tail_start is not None:
        if truncation is None:
            raise ValidationError("A spectrum with an open tail needs an explicit truncation")
        tau2 = tau2.expand_tail(truncation)
    terms = {i: p for i, p in tau2.proportions.items() if p > 0}
    likelihood = {i: (nbi_pmf(k, i, sigma) if i > 0 else float(k == 0)) for i in terms}
    denominator = math.fsum(likelihood[i] * p for i, p in terms.items())
    if denominator <= 0:
        return None
    return likelihood.get(k, 0.0) * terms.get(k, 0.0) / denominator


def expected_tau1_m1(k: int, sigma: float, tau2: TauSpectrum, truncation: Optional[int] = None) -> float:
    """Expected proportion of synthetic cells equal to k for a single replicate."""
    if tau2.tail_start is not None:
        if truncation is None:
            raise ValidationError("A spectrum with an open tail needs an explicit truncation")
        tau2 = tau2.expand_tail(truncation)
    total = 0.0
    for i, p in tau2.proportions.items():
        if p == 0:
            continue
        total += p * (nbi_pmf(k, i, sigma) if i > 0 else float(k == 0))
    return total
