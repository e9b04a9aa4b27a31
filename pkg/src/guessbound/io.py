"""CSV/JSON writers for curve-style tables.

Every table starts with the curve columns ``param, H_nats, H_bits, G,
deltaH_nats, deltaG``; sweeps and scatters add a ``source`` column and any
extra columns after those.  Floats are written with 17 significant digits.
Files are written to a temporary sibling and renamed, so an error never
leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

CURVE_COLUMNS = ("param", "H_nats", "H_bits", "G", "deltaH_nats", "deltaG")
OUTPUT_DIR_ENV = "GUESSBOUND_OUTPUT_DIR"


def format_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if hasattr(v, "__float__") and not isinstance(v, str):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, str) or v is None or isinstance(v, (bool, int)):
        return v
    x = float(v)
    return x if math.isfinite(x) else None


def column_order(rows, leading=CURVE_COLUMNS) -> list:
    cols = list(leading)
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    return cols


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(rows, columns, meta) -> str:
    doc = {
        "meta": {k: _json_value(v) if not isinstance(v, (dict, list)) else v for k, v in meta.items()},
        "columns": list(columns),
        "points": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def render(rows, fmt: str, meta: dict, leading=CURVE_COLUMNS) -> str:
    columns = column_order(rows, leading)
    if fmt == "csv":
        return render_csv(rows, columns)
    if fmt == "json":
        return render_json(rows, columns, meta)
    raise ValueError(f"unknown format {fmt!r}")


def resolve_output(path) -> Path:
    """Relative paths land in ``$GUESSBOUND_OUTPUT_DIR`` when it is set."""
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_atomic(path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    target = resolve_output(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise
    return target


def schema_path() -> Path:
    return Path(__file__).with_name("schemas") / "curve.schema.json"


def load_schema() -> dict:
    return json.loads(schema_path().read_text())
