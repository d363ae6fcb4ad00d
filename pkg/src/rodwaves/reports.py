"""JSON report envelopes.

Non-finite floats have no JSON spelling, so they are written as
``{"nonfinite": "+inf" | "-inf" | "nan"}`` and decoded back on load.
"""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from . import __version__

_TAGS = {"+inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def encode(obj):
    """Recursively turn numpy scalars/arrays, tuples and non-finite floats into JSON types."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [encode(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return {"nonfinite": "nan"}
        if math.isinf(f):
            return {"nonfinite": "+inf" if f > 0 else "-inf"}
        return f
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"nonfinite"} and obj["nonfinite"] in _TAGS:
            return _TAGS[obj["nonfinite"]]
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def envelope(command: str, parameters: dict, results, provenance: dict | None = None) -> dict:
    return encode({
        "command": command,
        "parameters": parameters,
        "results": results,
        "provenance": provenance or {},
        "version": __version__,
    })


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False)


def loads(text: str) -> dict:
    return decode(json.loads(text))


def load_schema() -> dict:
    ref = resources.files("rodwaves").joinpath("schemas/report.schema.json")
    return json.loads(ref.read_text())
