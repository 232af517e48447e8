"""Exact rational scalars.

``fractions.Fraction`` already keeps numerator and denominator reduced with a
positive denominator, so equality and hashing are canonical.  This module only
adds parsing and the string form used in JSON output.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Fraction
ScalarLike = Union[int, Fraction, str]


def to_scalar(value: ScalarLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")


def scalar_to_str(value: ScalarLike) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when ``q == 1``."""
    q = to_scalar(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_scalar(text: str) -> Fraction:
    return Fraction(text.strip())
