"""Structured JSON reports for the command-line tool."""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction

import numpy as np

from . import __version__

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def to_jsonable(x):
    """Plain JSON types; Fractions and cyclotomic numbers become strings."""
    from .cyclotomic import CycNum

    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, CycNum):
        return str(x)
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def canonical(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def input_hash(command: str, options: dict, payload) -> str:
    blob = canonical({"command": command, "options": options, "input": payload})
    return hashlib.sha256(blob.encode()).hexdigest()


def is_report(obj) -> bool:
    return isinstance(obj, dict) and "schema_version" in obj and "input" in obj and "command" in obj


def make_report(
    command: str,
    options: dict,
    payload,
    results,
    checks: list,
    timings: dict,
    exit_code: int,
    message: str = "",
) -> dict:
    passed = sum(1 for c in checks if c.get("pass"))
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "polarhecke", "version": __version__},
        "command": {"name": command, "options": to_jsonable(options)},
        "input_hash": input_hash(command, options, payload),
        "input": to_jsonable(payload),
        "results": to_jsonable(results),
        "checks": to_jsonable(checks),
        "timings": to_jsonable(timings),
        "summary": {
            "pass": exit_code == EXIT_OK,
            "exit_code": exit_code,
            "checks_passed": passed,
            "checks_total": len(checks),
            "message": message,
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
