"""
JSON interchange for schemas, tables and spectra.

Table JSON: {"schema": {"variables": [{"name": ..., "categories": [...]}, ...]},
             "counts": [...], "structural_zeros": [indices]}  (integer tables)
            {"schema": ..., "values": [...]}                   (real tables)
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from common.errors import ValidationError
from common.exporter import export_to_json
from common.pydantic_utils import dict_to_pydantic_model
from tables.models import ContingencyTable, RealTable, Schema, TauSpectrum

AnyTable = Union[ContingencyTable, RealTable]


def _read_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"File not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from e


def schema_to_dict(schema: Schema) -> Dict[str, Any]:
    return {"variables": [{"name": v.name, "categories": list(v.categories)} for v in schema.variables]}


def schema_from_dict(data: Dict[str, Any]) -> Schema:
    return dict_to_pydantic_model(data, Schema)


def table_to_dict(table: AnyTable) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"schema": schema_to_dict(table.table_schema)}
    if isinstance(table, ContingencyTable):
        payload["counts"] = table.counts.tolist()
        structural = np.flatnonzero(table.structural_zero_mask)
        if structural.size:
            payload["structural_zeros"] = structural.tolist()
    else:
        payload["values"] = table.values.tolist()
    return payload


def table_from_dict(data: Dict[str, Any]) -> AnyTable:
    if "schema" not in data:
        raise ValidationError("Table JSON needs a 'schema' field")
    schema = schema_from_dict(data["schema"])
    if "counts" in data:
        mask = None
        if data.get("structural_zeros"):
            mask = np.zeros(schema.K, dtype=bool)
            indices = np.asarray(data["structural_zeros"], dtype=np.int64)
            if indices.min() < 0 or indices.max() >= schema.K:
                raise ValidationError(f"structural_zeros index out of range 0..{schema.K - 1}")
            mask[indices] = True
        return dict_to_pydantic_model(
            {"schema": schema, "counts": data["counts"], "structural_zero_mask": mask}, ContingencyTable
        )
    if "values" in data:
        return dict_to_pydantic_model({"schema": schema, "values": data["values"]}, RealTable)
    raise ValidationError("Table JSON needs either 'counts' or 'values'")


def load_table(path: Union[str, Path]) -> AnyTable:
    return table_from_dict(_read_json(path))


def load_contingency_table(path: Union[str, Path]) -> ContingencyTable:
    table = load_table(path)
    if not isinstance(table, ContingencyTable):
        raise ValidationError(f"{path} holds a real-valued table; an integer count table is required")
    return table


def save_table(table: AnyTable, path: Union[str, Path]) -> None:
    export_to_json(table_to_dict(table), str(path), indent=None)


def load_schema(path: Union[str, Path]) -> Schema:
    data = _read_json(path)
    return schema_from_dict(data.get("schema", data))


def load_spectrum(path: Union[str, Path], total_cells: int = 1) -> TauSpectrum:
    """Spectrum JSON: {"proportions": {"0": 0.9, "1": 0.05, "6+": 0.05}} or the bare mapping."""
    data = _read_json(path)
    mapping = data.get("proportions", data)
    total = int(data.get("total_cells", total_cells)) if "proportions" in data else total_cells
    return TauSpectrum.from_mapping(mapping, total_cells=total, normalize=True)
