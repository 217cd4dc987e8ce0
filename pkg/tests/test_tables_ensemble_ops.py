import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from common.errors import ValidationError
from synthesis.engine import synthesize
from synthesis.models import SynthesisParams, SyntheticEnsemble
from tables.ensemble_ops import average_ensemble, pool_ensemble
from tables.fixtures import CENSUS_LIKE_SPECTRUM, fixture_from_spectrum
from tables.models import Schema

SCHEMA = Schema.from_pairs([("a", ["x", "y"])])


def make_ensemble(replicates):
    return SyntheticEnsemble(
        schema=SCHEMA, replicates=replicates, params=SynthesisParams(sigma=0.5, m=len(replicates))
    )


def test_average_and_pool_small():
    ensemble = make_ensemble([[0, 2], [2, 0]])
    assert average_ensemble(ensemble).values.tolist() == [1.0, 1.0]
    pooled = pool_ensemble(ensemble)
    assert pooled.counts.tolist() == [2, 2]
    assert pooled.n == sum(ensemble.n_syn)


def test_single_replicate_is_identity():
    ensemble = make_ensemble([[3, 4]])
    assert average_ensemble(ensemble).values.tolist() == [3.0, 4.0]
    assert pool_ensemble(ensemble).counts.tolist() == [3, 4]


def test_pool_equals_m_times_average():
    table = fixture_from_spectrum(CENSUS_LIKE_SPECTRUM, 5000, seed=2)
    ensemble = synthesize(table, SynthesisParams(sigma=0.5, m=7, master_seed=5))
    pooled = pool_ensemble(ensemble)
    averaged = average_ensemble(ensemble)
    np.testing.assert_allclose(pooled.counts, 7 * averaged.values, rtol=0, atol=1e-9)
    assert pooled.n == sum(ensemble.n_syn)


def test_pool_keeps_structural_zeros():
    ensemble = SyntheticEnsemble(
        schema=SCHEMA,
        replicates=[[0, 1], [0, 2]],
        params=SynthesisParams(sigma=0.0, m=2),
        structural_zero_mask=[True, False],
    )
    assert pool_ensemble(ensemble).structural_zero_mask.tolist() == [True, False]


def test_empty_ensemble_rejected():
    with pytest.raises(ValidationError):
        average_ensemble(None)
    with pytest.raises(ValidationError):
        pool_ensemble(None)
