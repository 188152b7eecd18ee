"""Readers for the fixedpurity CLI file formats (the only coupling point)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class InputFormatError(ValueError):
    """An input file does not match the expected CLI schema."""


def read_csv_columns(path: str | Path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        headers = reader.fieldnames or []
        missing = [c for c in required if c not in headers]
        if missing:
            raise InputFormatError(f"{path}: missing columns {missing}; has {headers}")
        rows = list(reader)
    out: dict[str, np.ndarray] = {}
    for col in headers:
        vals = [r[col] for r in rows]
        try:
            out[col] = np.array([float(v) for v in vals])
        except ValueError:
            out[col] = np.array(vals)
    return out


def read_cdf_table(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    for key in ("dim", "kind", "knots", "values"):
        if key not in doc:
            raise InputFormatError(f"{path}: not a CDF table file (missing {key!r})")
    return {
        "dim": int(doc["dim"]),
        "kind": doc["kind"],
        "knots": np.array([float(v) for v in doc["knots"]]),
        "values": np.array([float(v) for v in doc["values"]]),
    }


def read_sample_batch(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if "config" not in doc or "samples" not in doc:
        raise InputFormatError(f"{path}: not a sample batch file")
    cfg = doc["config"]
    recs = doc["samples"]
    return {
        "dim": int(cfg["dim"]),
        "mu": float(cfg["mu"]),
        "r": np.array([s["polar"]["r"] for s in recs]),
        "phi2": np.array([s["polar"]["phi2"] for s in recs]),
        "X": np.array([s["polar"]["X"] for s in recs]) if recs and recs[0]["polar"]["X"]
             else np.empty((len(recs), 0)),
        "eigs_desc": np.array([s["eigs_desc"] for s in recs]),
    }
