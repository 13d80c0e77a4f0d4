"""Exact rational arithmetic backend.

All game thresholds are strict rational inequalities, so every weight and
parameter in the engine is an exact rational.  gmpy2.mpq is used when
available (about 5x faster than fractions.Fraction); the two types are
hash- and comparison-compatible, so either works everywhere.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)


def rat(num, den=None):
    """Build an exact rational from ints, strings like '3/4', or rationals."""
    if den is not None:
        return Rat(num, den)
    if isinstance(num, str):
        if "/" in num:
            a, b = num.split("/")
            return Rat(int(a), int(b))
        return Rat(int(num))
    return Rat(num)


def as_fraction(x) -> Fraction:
    return Fraction(x.numerator, x.denominator)
