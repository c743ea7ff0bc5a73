"""Deterministic numeric formatting for data files and CLI output.

All numeric output is printed with 9 significant digits. Formatting then
re-parsing is idempotent (a 9-digit decimal is its own nearest double's
9-digit rendering), which is what makes export/import/export byte-stable.
Non-finite values are spelled "inf", "-inf", "nan".
"""

from __future__ import annotations

import json
import math

import numpy as np


def fmt9(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def parse_float(text: str) -> float:
    return float(text)


def to_jsonable(obj):
    """Round floats through 9 significant digits; spell non-finite as strings."""
    if isinstance(obj, dict):
        return {key: to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return float(fmt9(x))
        return fmt9(x)
    return obj


def from_jsonable_number(value) -> float:
    """Inverse of to_jsonable for numeric fields ("inf" strings included)."""
    if isinstance(value, str):
        return float(value)
    return float(value)


def json_dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + "\n"
