"""Deterministic CSV/JSON report emission."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os

from .. import __version__


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def provenance(cfg_hash: str) -> str:
    return f"heckelab {__version__}+cfg.{cfg_hash[:12]}"


def csv_text(rows: list[dict], fields: list[str] | None = None) -> str:
    fields = fields or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit(prefix: str | None, summary: dict, rows: list[dict], fields: list[str] | None = None) -> list[str]:
    """Write <prefix>.csv and <prefix>.json; returns the paths written."""
    if not prefix:
        return []
    _write(prefix + ".csv", csv_text(rows, fields))
    _write(prefix + ".json", json_text(summary))
    return [prefix + ".csv", prefix + ".json"]
