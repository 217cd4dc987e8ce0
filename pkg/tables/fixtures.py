"""
Desk-scale fixture tables drawn from a τ₂ spectrum.

The original administrative data behind the reference spectrum is not
distributable, so tests and demos draw stand-in tables whose cell sizes
follow the published proportions.
"""

from typing import List, Optional

import numpy as np
from loguru import logger

from common.errors import ValidationError
from config import config
from tables.models import ContingencyTable, Schema, TauSpectrum

# Proportion of cells of size 0..5 and 6+ in a large school-census-like table (K = 3.5 million)
CENSUS_LIKE_SPECTRUM = TauSpectrum.from_mapping(
    {0: 0.9038, 1: 0.0346, 2: 0.0148, 3: 0.0075, 4: 0.0056, 5: 0.0038, "6+": 0.0300},
    total_cells=3_500_000,
    normalize=True,
)


def _prime_factors(n: int) -> List[int]:
    factors = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def fixture_schema(K: int, max_categories: int = 1000) -> Schema:
    """Schema with K cells, factored into variables of at most `max_categories` levels where possible."""
    if K < 2:
        raise ValidationError(f"A fixture needs K >= 2 cells (a schema variable has at least 2 categories), got {K}")
    sizes = []
    current = 1
    for factor in sorted(_prime_factors(K), reverse=True):
        if current > 1 and current * factor > max_categories:
            sizes.append(current)
            current = factor
        else:
            current *= factor
    sizes.append(current)
    return Schema.from_pairs(
        (f"v{i + 1}", [str(c) for c in range(size)]) for i, size in enumerate(sizes)
    )


def fixture_from_spectrum(
    spectrum: TauSpectrum,
    K: int,
    max_count: Optional[int] = None,
    seed: int = 0,
    schema: Optional[Schema] = None,
) -> ContingencyTable:
    """Draw each of K cell sizes independently from the spectrum.

    An open "k+" bucket is spread uniformly over k..max_count.
    """
    if K <= 0:
        raise ValidationError(f"K must be positive, got {K}")
    if schema is None:
        schema = fixture_schema(K)
    elif schema.K != K:
        raise ValidationError(f"Schema has K={schema.K}, expected {K}")

    max_count = config.fixture.max_count if max_count is None else max_count
    sizes, probs = spectrum.expand_tail(max_count).as_arrays()
    rng = np.random.Generator(np.random.PCG64(seed))
    counts = rng.choice(sizes, size=K, p=probs / probs.sum())
    table = ContingencyTable(schema=schema, counts=counts)
    logger.debug(f"Fixture with K={K}, n={table.n} (seed={seed})")
    return table
