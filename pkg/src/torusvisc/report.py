"""Deterministic JSON/CSV serialization of reports and tables.

Floats in CSV files are written with 17 significant digits.  JSON uses
Python's shortest round-trip representation, which is equally lossless.
Non-finite floats become ``null`` in JSON and ``nan``/``inf`` in CSV.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


def plain(value):
    """Convert numpy scalars, enums, tuples and non-finite floats to JSON-ready values."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def dumps(obj) -> str:
    return json.dumps(plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def _cell(v) -> str:
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def table_csv(rows: Iterable[Mapping], columns: list[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    lines = []

    class _Sink:
        def write(self, s):
            lines.append(s)

    w = csv.writer(_Sink(), lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return "".join(lines)


def write_csv(path: str | Path, rows: Iterable[Mapping], columns: list[str] | None = None) -> Path:
    path = Path(path)
    path.write_text(table_csv(rows, columns))
    return path


def verdict_text(assertions: Mapping[str, bool]) -> str:
    lines = [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in assertions.items()]
    overall = all(assertions.values())
    lines.append(f"VERDICT {'PASS' if overall else 'FAIL'}")
    return "\n".join(lines) + "\n"
