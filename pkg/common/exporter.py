"""
Standardized data export utilities for tabsynth reports.
Supports CSV and JSON export with deterministic formatting, so identical
runs produce byte-identical files.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np

from common.errors import ValidationError
from common.utils import format_number


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_jsonable(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else None)
    if isinstance(value, Path):
        return str(value)
    return value


def export_to_csv(
    data: List[Dict[str, Any]],
    output_path: str,
    fieldnames: Optional[List[str]] = None,
    field_mapping: Optional[Dict[str, str]] = None,
    extras_action: Literal["ignore", "raise"] = "ignore",
    encoding: str = "utf-8",
    append: bool = False,
) -> None:
    """
    Export a list of dictionaries to a CSV file with configurable field mapping.
    Args:
        data: List of dictionaries to export.
        output_path: Path to the output CSV file.
        fieldnames: List of field names (columns) to export. If None, inferred from data.
        field_mapping: Optional mapping from data keys to CSV column names.
        extras_action: How to handle extra fields ('ignore', 'raise').
        encoding: Encoding for the output file.
        append: Add rows to an existing file instead of overwriting it; its header must match.
    """
    if not data:
        raise ValueError("No data provided for CSV export.")

    if fieldnames is None:
        fieldnames = list(data[0].keys())
    if field_mapping:
        csv_fieldnames = [field_mapping.get(fn, fn) for fn in fieldnames]
    else:
        csv_fieldnames = fieldnames

    path = Path(output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    appending = append and path.exists() and path.stat().st_size > 0
    if appending:
        with open(path, "r", newline="", encoding=encoding) as f:
            header = next(csv.reader(f), [])
        if header != list(csv_fieldnames):
            raise ValidationError(f"{output_path} has columns {header}, cannot append rows with {list(csv_fieldnames)}")
    with open(path, "a" if appending else "w", newline="", encoding=encoding) as f:
        writer = csv.DictWriter(f, fieldnames=csv_fieldnames, extrasaction=extras_action, lineterminator="\n")
        if not appending:
            writer.writeheader()
        for row in data:
            selected = {k: v for k, v in row.items() if k in fieldnames or extras_action == "raise"}
            if field_mapping:
                selected = {field_mapping.get(k, k): v for k, v in selected.items()}
            writer.writerow({k: v if isinstance(v, str) else format_number(v) for k, v in selected.items()})


def export_to_json(
    data: Any, output_path: str, indent: Optional[int] = 2, sort_keys: bool = False, encoding: str = "utf-8"
) -> None:
    """
    Export data to a JSON file with formatting options.
    Args:
        data: Data to export (list, dict, numpy arrays, etc.).
        output_path: Path to the output JSON file.
        indent: Indentation for pretty-printing (None for compact).
        sort_keys: Whether to sort keys in output.
        encoding: Encoding for the output file.
    """
    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding=encoding) as f:
        json.dump(_to_jsonable(data), f, indent=indent, sort_keys=sort_keys, ensure_ascii=False)
        f.write("\n")
