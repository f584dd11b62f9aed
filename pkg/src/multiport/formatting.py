"""Deterministic rendering of reports as JSON, CSV or plain text.

Floats are always written with ``%.12e`` so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from typing import Any

import numpy as np

FLOAT_FORMAT = "%.12e"


def plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, complex numbers and enums to JSON types."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return FLOAT_FORMAT % x


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None or isinstance(obj, (bool, str, int)) and not isinstance(obj, float):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (json.dumps(k) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(obj: Any, indent: int = 2) -> str:
    return _encode(plain(obj), indent, 0) + "\n"


def _cell(v: Any) -> str:
    v = plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v).strip('"')
    if isinstance(v, (list, dict)):
        return to_json(v, indent=0).strip()
    return str(v)


def to_csv(columns: list[str], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    obj = plain(obj)
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out.extend(flatten(v, f"{prefix}.{k}" if prefix else k))
        return out
    return [(prefix, obj)]


def report_csv(doc: dict[str, Any]) -> str:
    """Sweep rows as a table; other reports as ``key,value`` pairs."""
    result = doc.get("result", {})
    if "rows" in result:
        return to_csv(result["columns"], result["rows"])
    rows = [{"key": k, "value": v} for k, v in flatten({k: v for k, v in doc.items() if k != "input"})]
    return to_csv(["key", "value"], rows)


def report_pretty(doc: dict[str, Any]) -> str:
    lines = [f"{doc['command']} (v{doc['version']})"]
    result = dict(doc["result"])
    rows = result.pop("rows", None)
    result.pop("columns", None)
    for key, value in flatten(result):
        if isinstance(value, float):
            value = f"{value:.10g}"
        elif isinstance(value, list):
            value = to_json(value, indent=0).strip()
        lines.append(f"  {key}: {value}")
    for key, value in flatten(doc.get("residuals", {})):
        lines.append(f"  residual {key}: {value:.3e}" if isinstance(value, float) else f"  residual {key}: {value}")
    if rows is not None:
        lines.append(f"  ({len(rows)} rows; use --format csv for the table)")
    return "\n".join(lines) + "\n"
