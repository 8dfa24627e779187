"""Deterministic JSON serialization of experiment reports."""
from __future__ import annotations

import dataclasses
import json
import math

import numpy as np


def to_jsonable(obj):
    """Convert numpy scalars/arrays, dataclasses and tuples to plain JSON types.

    Non-finite floats become the strings "inf", "-inf" and "nan" so the
    output is strict JSON.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def experiment_report(name: str, params: dict, seed, rows=(), fitted=None,
                      flags=None) -> dict:
    flags = dict(flags or {})
    return {"experiment": name, "parameters": params, "seed": seed,
            "rows": list(rows), "fitted": dict(fitted or {}), "flags": flags,
            "passed": all(bool(v) for v in flags.values())}


def dumps(report) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"
