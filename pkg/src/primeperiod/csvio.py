"""Deterministic CSV output shared by every dataset the package emits.

Layout: a ``# config-hash: <sha256>`` comment line, a header row, then data
rows. UTF-8, ``\\n`` line endings, floats written with ``repr`` so reruns are
byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def config_hash(config: Mapping[str, Any] | None) -> str:
    payload = json.dumps(_jsonable(config or {}), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path: str | Path,
    header: Sequence[str],
    columns: Iterable[Sequence[Any]],
    config: Mapping[str, Any] | None = None,
) -> Path:
    """Write equal-length ``columns`` under ``header``; returns the path."""
    cols = [list(c) for c in columns]
    if len(cols) != len(header):
        raise ValueError(f"{len(header)} header names but {len(cols)} columns")
    if cols and len({len(c) for c in cols}) > 1:
        raise ValueError("columns have unequal lengths")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# config-hash: {config_hash(config)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: str | Path) -> tuple[str, list[str], list[list[str]]]:
    """Return (config hash, header, rows as strings)."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith("# config-hash: "):
            raise ValueError(f"{path}: missing config-hash comment line")
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader]
    return first.split(": ", 1)[1], header, rows
