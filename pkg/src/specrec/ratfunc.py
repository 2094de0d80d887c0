"""Rational functions in one variable over the rationals.

Normalized so the denominator is monic and coprime to the numerator.  Local
Laurent expansions work at rational points, at infinity (via z -> 1/z), and
at quotient-ring points (a symbolic root of a squarefree modulus); the
coefficient ring of the expansion follows the point.
"""

from __future__ import annotations

from .poly import Poly
from .rationals import Rat, format_rat
from .series import LSeries

INFINITY = "oo"


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly((Rat(num),))
        if den is None:
            den = Poly((Rat(1),))
        elif not isinstance(den, Poly):
            den = Poly((Rat(den),))
        if not den.coeffs:
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if g.degree() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        lead = den.lead()
        if not (lead == 1):
            inv = 1 / lead
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @staticmethod
    def const(c):
        return RatFunc(Poly((Rat(c),)))

    @staticmethod
    def var():
        return RatFunc(Poly((Rat(0), Rat(1))))

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        return self.den.degree() == 0

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return self.den.degree() == 0 and self.num == Poly((Rat(other),))

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    def __repr__(self):
        if self.den.degree() == 0:
            return "RatFunc(%r)" % self.num
        return "RatFunc(%r / %r)" % (self.num, self.den)

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RatFunc):
            return RatFunc(self.num.scale(Rat(other)), self.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RatFunc):
            return RatFunc(self.num.scale(1 / Rat(other)), self.den)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.const(other) / self

    def __pow__(self, n):
        if n < 0:
            return (1 / self) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def derivative(self):
        return RatFunc(self.num.derivative() * self.den - self.num * self.den.derivative(),
                       self.den * self.den)

    def eval(self, x):
        den = self.den.eval(x)
        if isinstance(x, Rat(0).__class__) or isinstance(x, int):
            if not den:
                raise ZeroDivisionError("pole at evaluation point")
            return self.num.eval(x) / den
        return self.num.eval(x) / den

    def has_pole_at(self, x) -> bool:
        return not self.den.eval(Rat(x))

    # -- local expansion -----------------------------------------------------------

    def local_series(self, point, hi, invert=None):
        """Laurent expansion in the local coordinate at `point`.

        point: a rational, INFINITY (coordinate 1/z), or any ring element a
        with arithmetic over the rationals (e.g. a quotient-ring generator);
        the expansion coefficients then live in that ring.  `hi` is the
        inclusive truncation cap; `invert` supplies ring inverses.
        """
        if self.num.is_zero():
            return LSeries(0, (), hi)
        if isinstance(point, str) and point == INFINITY:
            shift = self.den.degree() - self.num.degree()
            rnum = Poly(tuple(reversed(self.num.coeffs)))
            rden = Poly(tuple(reversed(self.den.coeffs)))
            pad = 2 * (rden.degree() + 1) + abs(shift)
            num_s = LSeries(0, rnum.coeffs, hi + pad)
            den_s = LSeries(0, rden.coeffs, hi + pad)
            return (num_s * den_s.inverse(invert)).shift(shift).truncate(hi)
        if isinstance(point, int) or type(point) is type(Rat(0)):
            point = Rat(point)
            zero = Rat(0)
        else:
            zero = point * 0
        num_shift = self.num.shift(point)
        den_shift = self.den.shift(point)
        pad = 2 * (self.den.degree() + 1)
        num_s = LSeries(0, num_shift.coeffs, hi + pad, zero)
        den_s = LSeries(0, den_shift.coeffs, hi + pad, zero)
        return (num_s * den_s.inverse(invert)).truncate(hi)

    def to_payload(self):
        return {"num": self.num.to_strings(), "den": self.den.to_strings()}

    def __str__(self):
        def side(p):
            return "[" + ", ".join(format_rat(c) for c in p.coeffs) + "]"
        return side(self.num) + "/" + side(self.den)


RF_ZERO = RatFunc(Poly(()))
RF_ONE = RatFunc(Poly((Rat(1),)))
