"""Scalar policy shared by every module.

A scalar is either a ``float`` (float64 mode) or a ``fractions.Fraction``
(exact mode).  Exact mode is closed under the four field operations, so any
computation that only multiplies, divides, adds and subtracts rational inputs
stays exact.  Integers are promoted to ``Fraction`` when they meet one.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Scalar = Union[float, Fraction]

#: Default relative tolerance used for float-mode equality checks.
DEFAULT_RTOL = 1e-9

_FRACTION_RE = re.compile(r"^\s*[-+]?\d+\s*/\s*\d+\s*$")


def is_exact(*values) -> bool:
    """True when every value is an int or a Fraction."""
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)


def as_exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip().replace(" ", ""))
    raise TypeError(f"cannot convert {value!r} to an exact scalar")


def coerce(value, exact: bool) -> Scalar:
    """Convert ``value`` to the scalar type of the requested mode."""
    if exact:
        return as_exact(value)
    if isinstance(value, str):
        return float(Fraction(value.strip())) if "/" in value else float(value)
    return float(value)


def parse_scalar(text: str) -> tuple[Scalar, bool]:
    """Parse ``"1/3"`` (exact) or ``"0.25"`` (float).

    Returns the value and whether the literal forces exact mode.
    """
    if _FRACTION_RE.match(text):
        return Fraction(text.replace(" ", "")), True
    return float(text), False


def to_float(value) -> float:
    return float(value)


def close(x, y, rtol: float = DEFAULT_RTOL, atol: float = 0.0) -> bool:
    """Equality under the scalar policy: exact compare when both are exact."""
    if is_exact(x, y):
        return x == y
    x, y = float(x), float(y)
    return abs(x - y) <= max(atol, rtol * max(abs(x), abs(y)))


def rel_diff(x, y) -> float:
    """``|x - y| / max(1, |x|, |y|)``; returns 0.0 for exact equality."""
    if is_exact(x, y) and x == y:
        return 0.0
    d = abs(x - y)
    scale = max(1, abs(x), abs(y))
    return float(d / scale) if is_exact(d, scale) else float(d) / float(scale)


def zero_like(*values) -> Scalar:
    return Fraction(0) if is_exact(*values) else 0.0


def one_like(*values) -> Scalar:
    return Fraction(1) if is_exact(*values) else 1.0


def log_ratio_index(u, base) -> float:
    """Real ``log(u) / log(base)``; NaN when undefined."""
    try:
        fu, fb = float(u), float(base)
    except OverflowError:
        return math.nan
    if fu <= 0 or fb <= 0 or fb == 1.0:
        return math.nan
    return math.log(fu) / math.log(fb)
