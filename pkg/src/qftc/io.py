"""File formats: JSON inputs, CSV outputs and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circulant import CirculantSpec
from .oracle import InputVector


def load_input_vector(path) -> InputVector:
    return InputVector.from_json(path)


def load_circulant_spec(path) -> CirculantSpec:
    return CirculantSpec.from_json(path)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path, columns: Sequence[str], rows: Iterable) -> Path:
    """Rows are dicts keyed by column or plain sequences; floats keep full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            vals = [row[c] for c in columns] if isinstance(row, dict) else list(row)
            w.writerow([_cell(v) for v in vals])
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_manifest(path, command: str, config: dict, outputs: Sequence, *, seed=None,
                   tallies: dict | None = None, wall_time: float | None = None,
                   criteria: dict | None = None, extra: dict | None = None) -> Path:
    """JSON record of a run; every output file is listed with its sha256."""
    path = Path(path)
    doc = {
        "command": command,
        "config": config,
        "seed": seed,
        "tallies": tallies or {},
        "wall_time_s": wall_time,
        "outputs": [{"path": str(Path(p)), "sha256": sha256_file(p)} for p in outputs],
        "criteria": criteria or {},
        "python": platform.python_version(),
    }
    if extra:
        doc.update(extra)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def check_manifest(path) -> list[str]:
    """Problems found re-hashing the outputs a manifest lists (empty when consistent)."""
    doc = json.loads(Path(path).read_text())
    problems = []
    for entry in doc.get("outputs", []):
        p = Path(entry["path"])
        if not p.exists():
            problems.append(f"missing {p}")
        elif sha256_file(p) != entry["sha256"]:
            problems.append(f"digest mismatch for {p}")
    return problems
