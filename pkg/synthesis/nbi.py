"""
Negative binomial type I (NBI) distribution with mean mu and variance mu + sigma*mu^2.

sigma = 0 is the Poisson limit. Sampling uses the Gamma-Poisson mixture:
G ~ Gamma(shape=1/sigma, scale=sigma*mu), Y ~ Poisson(G).
"""

from typing import Union

import numpy as np
from scipy import stats

from common.errors import ValidationError

ArrayLike = Union[float, np.ndarray]


def _validate(mu, sigma: float) -> None:
    if sigma is None or not np.isfinite(sigma) or sigma < 0:
        raise ValidationError(f"sigma must be a finite nonnegative number, got {sigma!r}")
    mu_arr = np.asarray(mu, dtype=np.float64)
    if not np.all(np.isfinite(mu_arr)) or np.any(mu_arr <= 0):
        raise ValidationError("mu must be positive and finite")


def nbi_pmf(y, mu: ArrayLike, sigma: float):
    """P(Y = y) for Y ~ NBI(mu, sigma).

    For sigma > 0: Γ(y+1/σ)/(Γ(y+1)Γ(1/σ)) (σμ/(1+σμ))^y (1/(1+σμ))^(1/σ).
    """
    _validate(mu, sigma)
    y_arr = np.asarray(y)
    if np.any(y_arr < 0) or not np.all(np.equal(np.mod(y_arr, 1), 0)):
        raise ValidationError("y must be a nonnegative integer")
    if sigma == 0:
        result = stats.poisson.pmf(y_arr, mu)
    else:
        result = stats.nbinom.pmf(y_arr, 1.0 / sigma, 1.0 / (1.0 + sigma * np.asarray(mu, dtype=np.float64)))
    return float(result) if np.ndim(result) == 0 else result


def nbi_variance(mu: ArrayLike, sigma: float):
    return mu + sigma * np.square(mu)


def draw_counts(mu: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Vectorized NBI draws; cells with mu == 0 come back 0.

    Consumes exactly one gamma draw (when sigma > 0) and one Poisson draw per
    element of `mu`, so the stream position of each cell is fixed by its index.
    """
    mu = np.asarray(mu, dtype=np.float64)
    if sigma == 0:
        return np.asarray(rng.poisson(mu), dtype=np.int64)
    shape = 1.0 / sigma
    gamma = rng.gamma(shape, scale=sigma * mu)
    return np.asarray(rng.poisson(gamma), dtype=np.int64)


def nbi_sample(mu: ArrayLike, sigma: float, rng: np.random.Generator, size=None):
    """Draw from NBI(mu, sigma); deterministic given the generator state."""
    _validate(mu, sigma)
    mu_arr = np.broadcast_to(np.asarray(mu, dtype=np.float64), size) if size is not None else np.asarray(mu, dtype=np.float64)
    draws = draw_counts(mu_arr, sigma, rng)
    return int(draws) if draws.ndim == 0 else draws


def nbi_tail_bound(mu: float, sigma: float, eps: float = 1e-10) -> int:
    """Smallest Y with P(NBI > Y) < eps."""
    _validate(mu, sigma)
    if sigma == 0:
        return int(stats.poisson.isf(eps, mu)) + 1
    return int(stats.nbinom.isf(eps, 1.0 / sigma, 1.0 / (1.0 + sigma * mu))) + 1
