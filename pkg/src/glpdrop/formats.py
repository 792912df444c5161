"""File formats: binary fields, CSV tables, flat JSON, atomic writes."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import DomainError
from .field import Field

MAGIC = b"GLPF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


def atomic_write(path, data) -> Path:
    """Write bytes or text to ``path`` via a temporary file and rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def field_to_bytes(field: Field) -> bytes:
    header = _HEADER.pack(MAGIC, VERSION, field.d, field.N, float(field.L), float(field.beta))
    return header + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def field_from_bytes(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise DomainError("field file shorter than its header")
    magic, version, d, N, L, beta = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DomainError(f"bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"unsupported field file version {version}")
    count = N**d
    body = data[_HEADER.size:]
    if len(body) != 8 * count:
        raise DomainError(f"expected {count} values, found {len(body) // 8}")
    values = np.frombuffer(body, dtype="<f8").reshape((N,) * d)
    return Field(values.astype(np.float64), L, beta)


def write_field(path, field: Field) -> Path:
    return atomic_write(path, field_to_bytes(field))


def read_field(path) -> Field:
    return field_from_bytes(Path(path).read_bytes())


def fmt(x) -> str:
    """Full double precision text for a number."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return "%.17g" % x
    return str(x)


def csv_text(header, rows, comments=()) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for c in comments:
        buf.write(f"# {c}\r\n")
    return buf.getvalue()


def field_csv(field: Field) -> str:
    axes = ["i", "j", "k"][: field.d]
    idx = np.indices(field.values.shape).reshape(field.d, -1).T
    rows = [list(map(int, ij)) + [v] for ij, v in zip(idx, field.values.ravel())]
    return csv_text(axes + ["m"], rows)


def mask_csv(mask) -> str:
    mask = np.asarray(mask, dtype=bool)
    axes = ["i", "j", "k"][: mask.ndim]
    idx = np.indices(mask.shape).reshape(mask.ndim, -1).T
    rows = [list(map(int, ij)) + [int(v)] for ij, v in zip(idx, mask.ravel())]
    return csv_text(axes + ["c"], rows)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def json_text(obj: dict) -> str:
    """Flat JSON with floats rendered at 17 significant digits."""
    parts = []
    for k, v in obj.items():
        v = _jsonable(v)
        if isinstance(v, float):
            parts.append(f"{json.dumps(str(k))}: {fmt(v)}")
        else:
            parts.append(f"{json.dumps(str(k))}: {json.dumps(v)}")
    return "{\n  " + ",\n  ".join(parts) + "\n}\n"
