import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from common.errors import ValidationError
from common.utils import make_rng
from synthesis.engine import cell_means, prefix, synthesize, synthesize_once
from synthesis.models import SynthesisParams, SyntheticEnsemble
from tables.fixtures import CENSUS_LIKE_SPECTRUM, fixture_from_spectrum, fixture_schema
from tables.models import ContingencyTable, Schema


@pytest.fixture
def table():
    schema = Schema.from_pairs([("a", ["a0", "a1"]), ("b", ["b0", "b1", "b2"])])
    return ContingencyTable(
        schema=schema, counts=[0, 1, 2, 3, 0, 5], structural_zero_mask=[False, False, False, False, True, False]
    )


def test_cell_means(table):
    params = SynthesisParams(sigma=0.5)
    assert cell_means(table, params).tolist() == [0.0, 1.0, 2.0, 3.0, 0.0, 5.0]
    params = SynthesisParams(sigma=0.5, alpha=0.5, size_factor=2.0)
    assert cell_means(table, params).tolist() == [1.0, 2.0, 4.0, 6.0, 0.0, 10.0]


def test_zeros_stay_zero_without_alpha(table):
    ensemble = synthesize(table, SynthesisParams(sigma=2.0, m=30, master_seed=9))
    assert ensemble.replicates.shape == (30, 6)
    assert not ensemble.replicates[:, 0].any()
    assert not ensemble.replicates[:, 4].any()
    assert ensemble.original_n == table.n
    assert len(ensemble.n_syn) == 30


def test_alpha_reaches_sampling_zeros_only(table):
    ensemble = synthesize(table, SynthesisParams(sigma=0.5, alpha=5.0, m=20, master_seed=1))
    assert ensemble.replicates[:, 0].sum() > 0
    assert not ensemble.replicates[:, 4].any()


def test_synthesize_is_deterministic(table):
    params = SynthesisParams(sigma=0.5, m=8, master_seed=77)
    assert np.array_equal(synthesize(table, params).replicates, synthesize(table, params).replicates)
    other = synthesize(table, params.model_copy(update={"master_seed": 78}))
    assert not np.array_equal(synthesize(table, params).replicates, other.replicates)


def test_worker_count_does_not_change_output(table):
    params = SynthesisParams(sigma=1.0, m=12, master_seed=5)
    serial = synthesize(table, params, workers=1)
    threaded = synthesize(table, params, workers=4)
    assert np.array_equal(serial.replicates, threaded.replicates)


def test_replicates_use_their_own_stream(table):
    params = SynthesisParams(sigma=1.0, m=4, master_seed=5)
    ensemble = synthesize(table, params)
    third = synthesize_once(table, params, make_rng(5, 2))
    assert np.array_equal(ensemble.replicate(2), third)


def test_prefix_equals_smaller_run(table):
    big = synthesize(table, SynthesisParams(sigma=0.5, m=10, master_seed=3))
    small = synthesize(table, SynthesisParams(sigma=0.5, m=5, master_seed=3))
    head = prefix(big, 5)
    assert head.m == 5
    assert head.params.m == 5
    assert np.array_equal(head.replicates, small.replicates)
    with pytest.raises(ValidationError):
        prefix(big, 11)
    with pytest.raises(ValidationError):
        prefix(big, 0)


def test_size_factor_scales_expected_total():
    schema = fixture_schema(6)
    table = ContingencyTable(schema=schema, counts=[100] * 6)
    ensemble = synthesize(table, SynthesisParams(sigma=0.1, m=200, size_factor=2.0, master_seed=4))
    assert np.mean(ensemble.n_syn) == pytest.approx(1200, abs=60)


def test_ensemble_validation(table):
    params = SynthesisParams(sigma=0.5, m=2)
    with pytest.raises(ValueError):
        SyntheticEnsemble(schema=table.table_schema, replicates=np.zeros((3, 6)), params=params)
    with pytest.raises(ValueError):
        SyntheticEnsemble(schema=table.table_schema, replicates=np.zeros((2, 5)), params=params)
    with pytest.raises(ValueError):
        SyntheticEnsemble(
            schema=table.table_schema,
            replicates=np.ones((2, 6)),
            params=params,
            structural_zero_mask=[True, False, False, False, False, False],
        )
    with pytest.raises(ValueError):
        SynthesisParams(sigma=-0.1)


def test_replicates_are_stored_as_int32(table):
    ensemble = synthesize(table, SynthesisParams(sigma=0.5, m=3, master_seed=11))
    assert ensemble.replicates.dtype == np.int32
    assert not ensemble.replicates.flags.writeable
    assert all(isinstance(total, int) for total in ensemble.n_syn)
    with pytest.raises(ValueError):
        SyntheticEnsemble(
            schema=table.table_schema, replicates=np.full((2, 6), 2**31, dtype=np.int64), params=SynthesisParams(sigma=0.5, m=2)
        )


def test_throughput_census_scale():
    table = fixture_from_spectrum(CENSUS_LIKE_SPECTRUM, 3_500_000, seed=1)
    start = time.perf_counter()
    ensemble = synthesize(table, SynthesisParams(sigma=0.5, m=1, master_seed=1))
    elapsed = time.perf_counter() - start
    assert ensemble.K == 3_500_000
    assert elapsed < 5.0
