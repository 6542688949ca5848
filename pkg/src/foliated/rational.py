"""Exact rational helpers: parsing, formatting and a negative-infinity marker."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


@total_ordering
class _NegInf:
    """Marker for an mld of minus infinity. Compares below every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("-inf")

    def __repr__(self):
        return "NEG_INF"

    def __str__(self):
        return "-inf"


NEG_INF = _NegInf()


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or an integer. Decimals are rejected on purpose."""
    text = text.strip()
    if not _RATIONAL.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    value = Fraction(text)
    return value


def fmt(value) -> str:
    """Render a rational as ``p/q`` (integers without denominator)."""
    if value is NEG_INF:
        return "-inf"
    if value is None:
        return "n/a"
    return str(Fraction(value))


def approx(value, digits: int = 6) -> str:
    if value is NEG_INF:
        return "-inf"
    if value is None:
        return "n/a"
    return f"{float(value):.{digits}g}"


def min_nonzero(values, default=Fraction(0)):
    """Minimum over the nonzero entries, ``default`` when there are none."""
    nz = [v for v in values if v != 0]
    return min(nz) if nz else default
