"""Deterministic CSV/JSON serialization helpers.

Conventions shared by every artifact the package writes:

* CSV: comma separator, ``\\n`` line endings, header row, floats printed with
  ``%.17g`` (shortest round-trip for IEEE doubles), ``.`` decimal point.
* JSON: ``indent=2`` and sorted keys, so files are stable under re-runs and
  diff cleanly.

``jsonable`` converts the nested dataclass/ndarray soup produced by the
library into plain JSON types; NaN/inf survive as strings to keep files
loadable by strict parsers.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

FLOAT_FMT = "%.17g"


def format_float(x: float) -> str:
    return FLOAT_FMT % float(x)


def jsonable(obj: Any) -> Any:
    """Recursively convert *obj* into something ``json.dumps`` accepts."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return jsonable(float(obj))
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dump_json(obj: Any, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write *rows* of mixed ints/floats/strings under *header*."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, (bool, np.bool_)):
                    cells.append(str(bool(cell)).lower())
                elif isinstance(cell, (int, np.integer)):
                    cells.append(str(int(cell)))
                elif isinstance(cell, (float, np.floating)):
                    cells.append(format_float(cell))
                else:
                    cells.append(str(cell))
            fh.write(",".join(cells) + "\n")


def read_csv_columns(path: str, ncols: int) -> list[np.ndarray]:
    """Read the first *ncols* numeric columns of a CSV file.

    A non-numeric first row is treated as a header and skipped.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty input file")
    start = 0
    try:
        float(lines[0].split(",")[0])
    except ValueError:
        start = 1
    cols: list[list[float]] = [[] for _ in range(ncols)]
    for ln in lines[start:]:
        parts = ln.split(",")
        if len(parts) < ncols:
            raise ValueError(f"{path}: expected {ncols} columns, got {len(parts)}")
        for i in range(ncols):
            cols[i].append(float(parts[i]))
    return [np.asarray(c, dtype=np.float64) for c in cols]
