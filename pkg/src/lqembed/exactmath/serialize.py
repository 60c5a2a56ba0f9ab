"""JSON records for exact scalars.

A rational is ``{"num": "p", "den": "q"}`` with string fields so that big
integers survive any JSON consumer.
"""
from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

DISPLAY_DIGITS = 12


def rational_to_json(x: Fraction | int) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def decimal_string(x: Fraction | int, digits: int = DISPLAY_DIGITS) -> str:
    """Render ``x`` to ``digits`` significant digits, round-half-even."""
    x = Fraction(x)
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, "f")
