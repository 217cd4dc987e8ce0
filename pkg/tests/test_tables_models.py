import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from common.errors import ValidationError
from tables.fixtures import CENSUS_LIKE_SPECTRUM
from tables.models import ContingencyTable, RealTable, Schema, TauSpectrum, Variable


@pytest.fixture
def schema():
    return Schema.from_pairs([("a", ["a0", "a1"]), ("b", ["b0", "b1", "b2"])])


def test_schema_shape_and_row_major_index(schema):
    assert schema.shape == (2, 3)
    assert schema.K == 6
    assert schema.names == ["a", "b"]
    assert schema.cell_index(["a0", "b0"]) == 0
    assert schema.cell_index(["a0", "b2"]) == 2
    assert schema.cell_index(["a1", "b0"]) == 3
    assert schema.cell_index(["a1", "b2"]) == 5


def test_schema_lookup_errors(schema):
    with pytest.raises(ValidationError):
        schema.axis_of("c")
    with pytest.raises(ValidationError):
        schema.category_index("a", "a9")
    with pytest.raises(ValidationError):
        schema.cell_index(["a0"])


def test_variable_validation():
    with pytest.raises(ValueError):
        Variable(name="x", categories=("only",))
    with pytest.raises(ValueError):
        Variable(name="x", categories=("p", "p"))
    with pytest.raises(ValueError):
        Schema.from_pairs([("x", ["0", "1"]), ("x", ["0", "1"])])


def test_contingency_table_basics(schema):
    table = ContingencyTable(schema=schema, counts=[0, 1, 2, 3, 0, 5], structural_zero_mask=[0, 0, 0, 0, 1, 0])
    assert table.K == 6
    assert table.n == 11
    assert table.values.dtype == np.float64
    assert table.sampling_zero_mask().tolist() == [True, False, False, False, False, False]


def test_contingency_table_default_mask(schema):
    table = ContingencyTable(schema=schema, counts=np.zeros(6, dtype=np.int64))
    assert not table.structural_zero_mask.any()
    assert table.sampling_zero_mask().all()


@pytest.mark.parametrize(
    "counts,mask",
    [
        ([0, 1, 2, 3, 4], None),  # wrong length
        ([0, -1, 2, 3, 4, 5], None),  # negative
        ([0, 1.5, 2, 3, 4, 5], None),  # fractional
        ([1, 1, 1, 1, 1, 1], [1, 0, 0, 0, 0, 0]),  # count in a structural zero
    ],
)
def test_contingency_table_rejects(schema, counts, mask):
    with pytest.raises(ValueError):
        ContingencyTable(schema=schema, counts=counts, structural_zero_mask=mask)


def test_contingency_table_counts_are_read_only(schema):
    table = ContingencyTable(schema=schema, counts=[1, 1, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        table.counts[0] = 5


def test_real_table(schema):
    table = RealTable(schema=schema, values=[0.5, 1, 1.5, 2, 0, 0])
    assert table.total == 5.0
    with pytest.raises(ValueError):
        RealTable(schema=schema, values=[-0.5, 1, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        RealTable(schema=schema, values=[np.nan, 1, 1, 1, 1, 1])
    counts = ContingencyTable(schema=schema, counts=[1, 2, 3, 4, 5, 6])
    assert RealTable.from_table(counts).values.tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_spectrum_from_mapping_normalizes():
    spectrum = TauSpectrum.from_mapping({0: 0.5, 1: 0.25, "3+": 0.25}, total_cells=4, normalize=True)
    assert spectrum.proportions == {0: 0.5, 1: 0.25, 3: 0.25}
    assert spectrum.tail_start == 3
    assert spectrum.get(1) == 0.25
    assert spectrum.get(2) == 0.0
    with pytest.raises(ValidationError):
        spectrum.get(4)


def test_spectrum_must_sum_to_one():
    with pytest.raises(ValidationError):
        TauSpectrum.from_mapping({0: 0.5, 1: 0.4}, total_cells=10)


def test_spectrum_renormalizes_rounding_only():
    rounded = TauSpectrum.from_mapping({0: 0.5, 1: 0.5001}, total_cells=10, normalize=True)
    assert sum(rounded.proportions.values()) == pytest.approx(1.0, abs=1e-12)
    assert rounded.get(0) == pytest.approx(0.5 / 1.0001)
    with pytest.raises(ValidationError, match="sum to 0.5"):
        TauSpectrum.from_mapping({0: 0.25, 1: 0.25}, total_cells=10, normalize=True)
    with pytest.raises(ValidationError):
        TauSpectrum.from_mapping({0: 2, 1: 1}, total_cells=10, normalize=True)


def test_spectrum_single_tail_only():
    with pytest.raises(ValidationError):
        TauSpectrum.from_mapping({"2+": 0.5, "4+": 0.5}, total_cells=10)


def test_spectrum_expand_tail():
    spectrum = TauSpectrum.from_mapping({0: 0.5, "6+": 0.5}, total_cells=10)
    expanded = spectrum.expand_tail(8)
    assert expanded.tail_start is None
    assert expanded.max_size == 8
    for k in (6, 7, 8):
        assert expanded.get(k) == pytest.approx(0.5 / 3)
    with pytest.raises(ValidationError):
        spectrum.expand_tail(5)


def test_spectrum_json_dict_marks_tail():
    spectrum = TauSpectrum.from_mapping({0: 0.5, "6+": 0.5}, total_cells=10)
    assert spectrum.to_json_dict() == {"proportions": {"0": 0.5, "6+": 0.5}, "total_cells": 10}


def test_census_like_spectrum_is_renormalized():
    total = sum(CENSUS_LIKE_SPECTRUM.proportions.values())
    assert total == pytest.approx(1.0, abs=1e-12)
    assert CENSUS_LIKE_SPECTRUM.tail_start == 6
    assert CENSUS_LIKE_SPECTRUM.get(0) == pytest.approx(0.9038 / 1.0001)
