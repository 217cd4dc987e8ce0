"""
Utility functions for tabsynth.
Contains common helpers used across multiple modules.
"""

import re
from typing import List, Tuple

import numpy as np

from common.errors import ValidationError

_BAND_RE = re.compile(r"^\s*(\d+)\s*:\s*([0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?)\s*$")
_TAIL_RE = re.compile(r"^\s*(?:>=|≥)?\s*(\d+)\s*(\+)?\s*$")


def derive_seed(master_seed: int, *keys: int) -> int:
    """Derive a 64-bit sub-seed from a master seed and a key path.

    The derivation only depends on (master_seed, keys), so a replicate or grid
    job gets the same stream no matter which worker runs it or in what order.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for stream `keys` under `master_seed`."""
    seq = np.random.SeedSequence(entropy=int(master_seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(seq))


def parse_band(text: str) -> Tuple[int, float]:
    """Parse a "k:d" band key such as "1:0.5"."""
    match = _BAND_RE.match(text or "")
    if not match:
        raise ValidationError(f"Band must look like 'k:d' (e.g. '1:0.5'), got {text!r}")
    return int(match.group(1)), float(match.group(2))


def band_key(k: int, d: float) -> str:
    """Inverse of parse_band."""
    return f"{int(k)}:{format_number(d)}"


def parse_spectrum_key(key) -> Tuple[int, bool]:
    """Return (k, is_open_tail) for a spectrum key like 3, "3", "6+" or ">=6"."""
    if isinstance(key, (int, np.integer)):
        return int(key), False
    match = _TAIL_RE.match(str(key))
    if not match:
        raise ValidationError(f"Invalid spectrum key {key!r}; expected an integer or 'k+'")
    is_tail = bool(match.group(2)) or str(key).strip().startswith((">=", "≥"))
    return int(match.group(1)), is_tail


def format_number(value) -> str:
    """Deterministic text form for CSV/JSON cells (repr-precision floats, blanks for None)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value.is_integer() and abs(value) < 1e15:
        return f"{value:.1f}"
    return repr(value)


def parse_float_list(text: str) -> List[float]:
    """Parse "0,0.1,0.5" into floats."""
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"Expected a comma-separated list of numbers, got {text!r}") from None


def parse_int_list(text: str) -> List[int]:
    """Parse "1,2,5" into ints."""
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"Expected a comma-separated list of integers, got {text!r}") from None
