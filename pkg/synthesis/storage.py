"""
Persistence for synthetic ensembles.

Two layouts:
- directory: manifest.json (params, schema, per-replicate n_syn) plus one
  table JSON per replicate (rep_0001.json, ...);
- columnar CSV: cell_index,rep_1..rep_m with a `<stem>.manifest.json` sidecar.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd
from loguru import logger

from common.errors import ValidationError
from common.exporter import export_to_json
from common.pydantic_utils import dict_to_pydantic_model, model_to_dict
from synthesis.models import SynthesisParams, SyntheticEnsemble
from tables.io import load_contingency_table, save_table, schema_from_dict, schema_to_dict
from tables.models import ContingencyTable

MANIFEST_NAME = "manifest.json"
FORMAT_VERSION = 1


def _digest(replicates: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(replicates).tobytes()).hexdigest()


def _manifest(ensemble: SyntheticEnsemble, layout: str, files) -> Dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "layout": layout,
        "params": model_to_dict(ensemble.params),
        "schema": schema_to_dict(ensemble.table_schema),
        "n_syn": ensemble.n_syn,
        "original_n": ensemble.original_n,
        "structural_zeros": np.flatnonzero(ensemble.structural_zero_mask).tolist(),
        "files": files,
        "sha256": _digest(ensemble.replicates),
    }


def _read_manifest(path: Path) -> Dict[str, Any]:
    if not path.exists():
        raise ValidationError(f"Ensemble manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    if manifest.get("format_version") != FORMAT_VERSION:
        raise ValidationError(f"Unsupported ensemble format version {manifest.get('format_version')!r}")
    return manifest


def _build(manifest: Dict[str, Any], replicates: np.ndarray) -> SyntheticEnsemble:
    schema = schema_from_dict(manifest["schema"])
    mask = np.zeros(schema.K, dtype=bool)
    mask[np.asarray(manifest.get("structural_zeros", []), dtype=np.int64)] = True
    ensemble = dict_to_pydantic_model(
        {
            "schema": schema,
            "replicates": replicates,
            "params": dict_to_pydantic_model(manifest["params"], SynthesisParams),
            "structural_zero_mask": mask,
            "original_n": manifest.get("original_n"),
        },
        SyntheticEnsemble,
    )
    if ensemble.n_syn != list(manifest["n_syn"]):
        raise ValidationError("Replicate totals do not match the manifest's n_syn")
    if manifest.get("sha256") and manifest["sha256"] != _digest(ensemble.replicates):
        logger.warning("Ensemble checksum differs from manifest; files may have been edited")
    return ensemble


def save_ensemble(ensemble: SyntheticEnsemble, directory: Union[str, Path]) -> Path:
    """Write manifest.json plus one table JSON per replicate."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for index in range(ensemble.m):
        name = f"rep_{index + 1:04d}.json"
        table = ContingencyTable(
            schema=ensemble.table_schema,
            counts=ensemble.replicate(index),
            structural_zero_mask=ensemble.structural_zero_mask,
        )
        save_table(table, directory / name)
        files.append(name)
    export_to_json(_manifest(ensemble, "directory", files), str(directory / MANIFEST_NAME))
    logger.info(f"Saved ensemble of m={ensemble.m} to {directory}")
    return directory


def load_ensemble(path: Union[str, Path]) -> SyntheticEnsemble:
    """Load either layout: a manifest directory or a columnar CSV with its sidecar."""
    path = Path(path)
    if path.is_dir():
        manifest = _read_manifest(path / MANIFEST_NAME)
        rows = [load_contingency_table(path / name).counts for name in manifest["files"]]
        return _build(manifest, np.stack(rows))
    if path.suffix.lower() == ".csv":
        return load_ensemble_csv(path)
    raise ValidationError(f"{path} is neither an ensemble directory nor a CSV file")


def _sidecar(path: Path) -> Path:
    return path.with_name(f"{path.stem}.manifest.json")


def export_ensemble_csv(ensemble: SyntheticEnsemble, path: Union[str, Path]) -> Path:
    """Single columnar CSV: cell_index, rep_1..rep_m."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        ensemble.replicates.T, columns=[f"rep_{i + 1}" for i in range(ensemble.m)]
    )
    frame.insert(0, "cell_index", np.arange(ensemble.K, dtype=np.int64))
    frame.to_csv(path, index=False, lineterminator="\n")
    export_to_json(_manifest(ensemble, "csv", [path.name]), str(_sidecar(path)))
    logger.info(f"Exported ensemble of m={ensemble.m} to {path}")
    return path


def load_ensemble_csv(path: Union[str, Path]) -> SyntheticEnsemble:
    path = Path(path)
    manifest = _read_manifest(_sidecar(path))
    frame = pd.read_csv(path)
    expected = ["cell_index"] + [f"rep_{i + 1}" for i in range(len(manifest["n_syn"]))]
    if list(frame.columns) != expected:
        raise ValidationError(f"{path} columns {list(frame.columns)} do not match {expected}")
    if not np.array_equal(frame["cell_index"].to_numpy(), np.arange(len(frame))):
        raise ValidationError(f"{path} cell_index must run 0..K-1 in order")
    return _build(manifest, frame[expected[1:]].to_numpy(dtype=np.int64).T)
