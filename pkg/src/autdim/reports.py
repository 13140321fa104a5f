"""Deterministic JSON and CSV writers.

Floats are written with 17 significant digits so that a value read back is
bit-identical; non-finite floats become the strings "inf", "-inf", "nan".
Complex numbers are written as [re, im].
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _plain(obj):
    """Reduce numpy scalars/arrays, tuples and complex numbers to JSON-like Python values."""
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
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        s = fmt(obj)
        return s if math.isfinite(obj) else f'"{s}"'
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + _encode(k, indent, level + 1) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(_plain(obj), indent, 0) + "\n"


def report_document(command: str, config: dict, body: dict) -> dict:
    return {"schemaVersion": SCHEMA_VERSION, "command": command, "config": config, **body}


def write_json(path: str, obj) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    return path


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    if v is None:
        return ""
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(columns, rows))
    return path


def trajectory_rows(times, points) -> tuple:
    """Columns t, Re z1, Im z1, ... for an orbit sample."""
    P = np.atleast_2d(np.asarray(points, dtype=complex))
    cols = ["t"]
    for k in range(P.shape[1]):
        cols += [f"re_z{k + 1}", f"im_z{k + 1}"]
    rows = []
    for t, p in zip(times, P):
        row = [float(t)]
        for c in p:
            row += [float(c.real), float(c.imag)]
        rows.append(row)
    return tuple(cols), rows


def candidate_rows(candidate) -> tuple:
    """Coefficients of h; the extremal map is h divided by the normalizer."""
    rows = candidate.to_csv_rows()
    return tuple(rows[0]), rows[1:]


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
