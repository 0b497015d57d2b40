"""Half-away-from-zero decimal rounding for record keys and report cells.

Python's builtin ``round`` is banker's rounding and float-repr sensitive;
record keys and formatted tables need one fixed, locale-independent rule.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal


def round_half_away(value: float, decimals: int = 2) -> Decimal:
    """Round to ``decimals`` places, ties away from zero (-0.305 -> -0.31)."""
    if value == 0:
        value = 0.0  # collapse -0.0
    quantum = Decimal(1).scaleb(-decimals)
    return Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)


def format_fixed(value: float, decimals: int = 2) -> str:
    """Fixed-point string of ``value`` under the half-away-from-zero rule."""
    return str(round_half_away(value, decimals))
