import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from common import utils
from common.errors import ValidationError


def test_derive_seed_is_deterministic():
    assert utils.derive_seed(7, 1, 2) == utils.derive_seed(7, 1, 2)
    assert utils.derive_seed(7, 1, 2) != utils.derive_seed(7, 2, 1)
    assert utils.derive_seed(7, 1) != utils.derive_seed(8, 1)


def test_make_rng_streams_depend_only_on_keys():
    first = utils.make_rng(42, 3).random(5)
    second = utils.make_rng(42, 3).random(5)
    other = utils.make_rng(42, 4).random(5)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


# Test parse_band
@pytest.mark.parametrize(
    "text,expected",
    [("1:0.5", (1, 0.5)), ("0:0", (0, 0.0)), (" 2 : 1e-1 ", (2, 0.1)), ("10:3", (10, 3.0))],
)
def test_parse_band(text, expected):
    assert utils.parse_band(text) == expected


@pytest.mark.parametrize("text", ["1", "a:b", "-1:0.5", "", "1:-0.5"])
def test_parse_band_invalid(text):
    with pytest.raises(ValidationError):
        utils.parse_band(text)


def test_band_key_inverts_parse_band():
    assert utils.band_key(1, 0.5) == "1:0.5"
    assert utils.parse_band(utils.band_key(3, 0.25)) == (3, 0.25)


@pytest.mark.parametrize(
    "key,expected",
    [(3, (3, False)), ("4", (4, False)), ("6+", (6, True)), (">=6", (6, True)), (np.int64(2), (2, False))],
)
def test_parse_spectrum_key(key, expected):
    assert utils.parse_spectrum_key(key) == expected


def test_parse_spectrum_key_invalid():
    with pytest.raises(ValidationError):
        utils.parse_spectrum_key("many")


@pytest.mark.parametrize(
    "value,expected",
    [
        (None, ""),
        (3, "3"),
        (np.int64(12), "12"),
        (2.0, "2.0"),
        (0.1, "0.1"),
        (float("inf"), "inf"),
        (True, "true"),
    ],
)
def test_format_number(value, expected):
    assert utils.format_number(value) == expected


def test_parse_lists():
    assert utils.parse_float_list("0,0.1, 2") == [0.0, 0.1, 2.0]
    assert utils.parse_int_list("1,2,5,") == [1, 2, 5]
    with pytest.raises(ValidationError):
        utils.parse_int_list("1,two")
    with pytest.raises(ValidationError):
        utils.parse_float_list("0.5,x")
