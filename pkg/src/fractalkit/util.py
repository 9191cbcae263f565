"""Shared helpers: canonical JSON, deterministic parallel map, seeded RNG."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


class ModelError(ValueError):
    """Input data violates a mathematical precondition of the requested operation."""


class CapacityError(RuntimeError):
    """Requested problem size exceeds a documented hard cap."""


class SingularityError(ArithmeticError):
    """Spectral parameter too close to a pole of the resolvent."""

    def __init__(self, z, nearest_eigenvalue):
        self.z = z
        self.nearest_eigenvalue = nearest_eigenvalue
        super().__init__(
            f"parameter z = {z} is numerically singular; nearest eigenvalue "
            f"-lambda = {-nearest_eigenvalue}"
        )


class GateError(ValueError):
    """Symbol rejected by a summability/integrability gate."""


def fmt_float(x: float) -> str:
    """Render a float at 17 significant digits, stable across runs."""
    if isinstance(x, float) and math.isfinite(x):
        return format(x, ".17g")
    if isinstance(x, float):
        # Infinities / NaN are serialized as strings so the JSON stays standard.
        return f'"{x!r}"'
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Serialize to JSON with sorted keys, fixed separators, 17-digit floats.

    Output is byte-stable for equal inputs: no timestamps, no locale, no
    dict-order dependence. Accepts the usual JSON types plus numpy scalars,
    complex numbers (as {"re": ..., "im": ...}) and tuples.
    """
    out: list[str] = []
    _write_json(obj, out)
    return "".join(out)


def _write_json(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _write_json({"re": float(obj.real), "im": float(obj.imag)}, out)
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be str, got {key!r}")
            if not first:
                out.append(",")
            out.append(_escape(key))
            out.append(":")
            _write_json(obj[key], out)
            first = False
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write_json(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def thread_count() -> int:
    """Worker count from FRACTAL_THREADS, default 1."""
    try:
        n = int(os.environ.get("FRACTAL_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn, items):
    """Map preserving input order; threads only if FRACTAL_THREADS > 1.

    Results are collected in index order, so reductions over the output do not
    depend on scheduling.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))
