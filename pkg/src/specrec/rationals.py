"""Exact rational scalars.

All coefficients in this package are arbitrary-precision rationals.  We use
gmpy2.mpq when available (it is a drop-in, much faster implementation of the
same normalized p/q semantics) and fall back to fractions.Fraction otherwise.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)


def rat(p, q=1):
    """Build a rational from integers or from another rational."""
    return Rat(p) / Rat(q) if q != 1 else Rat(p)


def parse_rat(text: str):
    """Parse "p/q" or "p" into a rational.  Whitespace is tolerated."""
    s = text.strip()
    if "/" in s:
        p, q = s.split("/")
        den = int(q)
        if den == 0:
            raise ValueError("zero denominator in %r" % text)
        return Rat(int(p), den)
    return Rat(int(s))


def format_rat(x) -> str:
    """Canonical "p/q" (or "p" for integers) form used by all serializers."""
    x = Rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)
