"""CSV helpers: commented provenance header, 17-significant-digit floats."""
from __future__ import annotations

import csv
import hashlib
import json

import numpy as np

from . import __version__


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header_lines(config: dict | None = None, extra=()) -> list[str]:
    lines = [f"phaseless1d {__version__}"]
    if config is not None:
        lines.append(f"config_hash={config_hash(config)}")
    lines.extend(extra)
    return lines


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_table(path, columns, rows, header=()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_table(path) -> tuple[dict, list[str]]:
    """Return ``(columns, comments)``; numeric columns become float arrays."""
    comments = []
    with open(path, newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif line.strip():
                lines.append(line)
    reader = csv.reader(lines)
    names = next(reader)
    raw = {n: [] for n in names}
    for row in reader:
        for n, v in zip(names, row):
            raw[n].append(v)
    cols = {}
    for n, vals in raw.items():
        try:
            cols[n] = np.array([float(v) for v in vals])
        except ValueError:
            cols[n] = np.array(vals)
    return cols, comments
