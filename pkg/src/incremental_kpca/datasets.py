"""Loaders for the UCI magic04 and yeast files and for plain numeric CSV."""
from __future__ import annotations

import enum
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    pass


class DatasetKind(str, enum.Enum):
    MAGIC = "magic"
    YEAST = "yeast"
    CSV = "csv"


MAGIC_FEATURES = 10
YEAST_FEATURES = 8


def _floats(fields, path, lineno):
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise DatasetError(f"{path}:{lineno}: non-numeric value in {fields!r}") from None


def _parse_magic(lines, path):
    rows = []
    for lineno, line in lines:
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != MAGIC_FEATURES + 1:
            raise DatasetError(
                f"{path}:{lineno}: expected {MAGIC_FEATURES + 1} fields, got {len(fields)}"
            )
        if fields[-1] not in ("g", "h"):
            raise DatasetError(f"{path}:{lineno}: unknown class label {fields[-1]!r}")
        rows.append(_floats(fields[:-1], path, lineno))
    return rows


def _parse_yeast(lines, path):
    rows = []
    for lineno, line in lines:
        fields = line.split()
        if len(fields) != YEAST_FEATURES + 2:
            raise DatasetError(
                f"{path}:{lineno}: expected {YEAST_FEATURES + 2} fields, got {len(fields)}"
            )
        rows.append(_floats(fields[1:-1], path, lineno))
    return rows


def _parse_csv(lines, path):
    rows = []
    for pos, (lineno, line) in enumerate(lines):
        fields = [f.strip() for f in line.split(",")]
        try:
            values = [float(f) for f in fields]
        except ValueError:
            if pos == 0:
                continue  # header
            raise DatasetError(f"{path}:{lineno}: non-numeric value in {fields!r}") from None
        if rows and len(values) != len(rows[0]):
            raise DatasetError(
                f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(values)}"
            )
        rows.append(values)
    return rows


_PARSERS = {
    DatasetKind.MAGIC: _parse_magic,
    DatasetKind.YEAST: _parse_yeast,
    DatasetKind.CSV: _parse_csv,
}


def parse_lines(text: str, kind, path="<string>") -> np.ndarray:
    kind = DatasetKind(kind)
    lines = [(i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]
    rows = _PARSERS[kind](lines, path)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    if not np.all(np.isfinite(data)):
        raise DatasetError(f"{path}: non-finite values in data")
    return data


def load_dataset(path, kind) -> np.ndarray:
    """Feature matrix of shape ``(n, d)``; categorical targets are dropped."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    return parse_lines(text, kind, path)
