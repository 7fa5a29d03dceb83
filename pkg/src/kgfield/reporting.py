"""Deterministic CSV and JSON report emission.

Every artifact carries a comment header with the tool version, a sha256
of the generating config, the full parameter echo, and the write
timestamp.  The timestamp lives only in the header: for a fixed config
and seed the body (column row, data rows, footer) is reproducible byte
for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from datetime import datetime, timezone

import numpy as np

from . import __version__


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    raise TypeError(f"not serializable: {type(x).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_jsonable)


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def format_value(v) -> str:
    """Round-trip-safe scalar formatting for CSV cells."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    return str(v)


def _flatten(obj, prefix="") -> list[tuple[str, str]]:
    out = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            out.extend(_flatten(obj[key], f"{prefix}{key}." if prefix else f"{key}."))
        return out
    key = prefix[:-1]
    if isinstance(obj, (list, tuple)):
        out.append((key, canonical_json(list(obj))))
    else:
        out.append((key, format_value(obj)))
    return out


def timestamp_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def header_lines(config, timestamp: str | None = None,
                 extra: tuple[str, ...] = ()) -> list[str]:
    lines = [
        f"# kgfield {__version__}",
        f"# config-sha256 {config_hash(config)}",
        f"# written {timestamp or timestamp_now()}",
    ]
    for key, val in _flatten(config):
        lines.append(f"# param {key}={val}")
    lines.extend(f"# {line}" for line in extra)
    return lines


def render_csv(columns, rows, config, footer: tuple[str, ...] = (),
               timestamp: str | None = None) -> str:
    """Full CSV text: comment header, column row, data rows, footer."""
    buf = io.StringIO()
    for line in header_lines(config, timestamp):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def write_csv(path, columns, rows, config, footer: tuple[str, ...] = (),
              timestamp: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(columns, rows, config, footer, timestamp))


def write_json(path, payload, config, timestamp: str | None = None) -> None:
    doc = {
        "tool": {"name": "kgfield", "version": __version__},
        "config_sha256": config_hash(config),
        "written": timestamp or timestamp_now(),
        "config": config,
    }
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def body_lines(csv_text: str) -> list[str]:
    """Everything except comment lines; used to compare determinism."""
    return [ln for ln in csv_text.splitlines() if not ln.startswith("#")]


def footer_lines(csv_text: str) -> list[str]:
    """Comment lines after the first data row (slope footers and the like)."""
    lines = csv_text.splitlines()
    seen_data = False
    out = []
    for ln in lines:
        if not ln.startswith("#"):
            seen_data = True
        elif seen_data:
            out.append(ln)
    return out
