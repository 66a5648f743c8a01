"""JSON-lines and CSV report writers with fixed numeric formatting."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Iterable, Sequence

import numpy as np

JSON_DIGITS = 17
CSV_DIGITS = 6


def _plain(obj):
    """Convert numpy scalars/arrays, tuples and dataclass-like objects to JSON types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    return str(obj)


def format_float(x: float, digits: int) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, f".{digits}g")


def dumps(obj, digits: int = JSON_DIGITS) -> str:
    """Compact JSON with floats written to ``digits`` significant digits."""
    obj = _plain(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(v, digits)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ",".join(dumps(v, digits) for v in obj) + "]"
    if isinstance(obj, float):
        return format_float(obj, digits)
    return json.dumps(obj)


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return format_float(v, CSV_DIGITS).strip('"')
    if isinstance(v, (dict, list)):
        return dumps(v, CSV_DIGITS)
    if v is None:
        return ""
    return str(v).lower() if isinstance(v, bool) else str(v)


def render(records: Iterable[dict], fmt: str, header: dict | None = None,
           fields: Sequence[str] | None = None) -> str:
    """Render records; ``header`` fields are prepended to every record."""
    header = header or {}
    rows = [{**header, **_plain(r)} for r in records]
    if fmt == "json":
        return "".join(dumps(r) + "\n" for r in rows)
    if fmt == "csv":
        cols = list(fields) if fields else list(header)
        for r in rows:
            cols += [k for k in r if k not in cols]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_csv_cell(r.get(c)) for c in cols])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(records: Iterable[dict], fmt: str = "json", path: str | None = None,
                header: dict | None = None, fields: Sequence[str] | None = None) -> None:
    """Write records to ``path`` (stdout when None or '-')."""
    text = render(records, fmt, header, fields)
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
