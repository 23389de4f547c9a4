#!/usr/bin/env python3
"""
reports.py: Deterministic JSON and CSV output

Floats are rounded to REPORT_DIGITS significant digits, numpy scalars and
arrays become plain Python values, field order is the insertion order of
the dicts handed in. Same input, same bytes.
"""

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from constants import REPORT_DIGITS


def clean(value):
    """Recursively convert to JSON-ready Python values with fixed float precision"""
    if isinstance(value, dict):
        return {str(key): clean(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(item) for item in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return clean(float(value))
    if isinstance(value, (float, np.floating)):
        return round_float(float(value))
    return value


def round_float(x: float):
    if not math.isfinite(x):
        return str(x)
    rounded = float(f"{x:.{REPORT_DIGITS}g}")
    return 0.0 if rounded == 0.0 else rounded


def to_json(report) -> str:
    return json.dumps(clean(report), ensure_ascii=False, indent=2) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(item) for item in clean(list(row))])
    return buffer.getvalue()


def _cell(item):
    if isinstance(item, list):
        return ";".join(str(x) for x in item)
    return item


def write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
