"""Arithmetic in Q[t]/(p) for squarefree monic p, without factoring p.

Elements represent a value at "all roots of p at once".  Inverses exist iff
the element is coprime to the modulus; when a genuine zero divisor shows up
the gcd witness is raised as NeedSplit and callers may split the modulus and
continue on each coprime factor (the roots behave differently and must be
treated separately).

Traces of multiplication operators give exact sums over the roots; this is
how residue sums over irrational ramification points stay in Q.
"""

from __future__ import annotations

from .poly import Poly
from .rationals import Rat
from .ratfunc import RatFunc


class NeedSplit(Exception):
    def __init__(self, factor: Poly):
        super().__init__("zero divisor modulo %r" % (factor,))
        self.factor = factor


class QuotientRing:
    def __init__(self, modulus: Poly):
        if modulus.degree() < 1:
            raise ValueError("modulus must be nonconstant")
        modulus = modulus.monic()
        self.modulus = modulus
        self.n = modulus.degree()
        self._power_sums = [Rat(self.n)]
        self._t_powers = [Poly((Rat(1),))]

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self.modulus == other.modulus

    def __hash__(self):
        return hash(self.modulus)

    def __repr__(self):
        return "QuotientRing(%r)" % (self.modulus,)

    # -- element constructors ---------------------------------------------------

    def elem(self, poly_or_scalar):
        if isinstance(poly_or_scalar, QRElem):
            if poly_or_scalar.ring is not self and poly_or_scalar.ring != self:
                raise ValueError("element from a different quotient ring")
            return poly_or_scalar
        if not isinstance(poly_or_scalar, Poly):
            poly_or_scalar = Poly((Rat(poly_or_scalar),))
        return QRElem(self, (poly_or_scalar % self.modulus).coeffs)

    @property
    def zero(self):
        return QRElem(self, ())

    @property
    def one(self):
        return QRElem(self, (Rat(1),))

    @property
    def gen(self):
        return self.elem(Poly((Rat(0), Rat(1))))

    # -- core operations ----------------------------------------------------------

    def inverse(self, el) -> "QRElem":
        if not isinstance(el, QRElem):
            el = self.elem(el)
        a = Poly(el.coeffs)
        if not a.coeffs:
            raise ZeroDivisionError("inverse of zero in quotient ring")
        # extended Euclid: s*a + t*modulus = g
        r0, r1 = self.modulus, a
        s0, s1 = Poly(), Poly((Rat(1),))
        while r1.coeffs:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree() > 0:
            raise NeedSplit(r0.monic())
        return self.elem(s0.scale(1 / r0.lead()))

    def power_sum(self, k: int):
        """Sum of k-th powers of the roots of the modulus (Newton's identities)."""
        c = self.modulus.coeffs
        n = self.n
        while len(self._power_sums) <= k:
            m = len(self._power_sums)
            if m <= n:
                acc = Rat(0)
                for i in range(1, m):
                    acc += c[n - i] * self._power_sums[m - i]
                self._power_sums.append(-acc - Rat(m) * c[n - m])
            else:
                acc = Rat(0)
                for i in range(1, n + 1):
                    acc += c[n - i] * self._power_sums[m - i]
                self._power_sums.append(-acc)
        return self._power_sums[k]

    def trace(self, el: "QRElem"):
        """Trace of multiplication by el = sum of el over all roots."""
        acc = Rat(0)
        for j, cj in enumerate(el.coeffs):
            if cj:
                acc += cj * self.power_sum(j)
        return acc

    def eval_ratfunc(self, f: RatFunc) -> "QRElem":
        num = self.elem(f.num)
        den = self.elem(f.den)
        return num * self.inverse(den)

    def divided_modulus(self):
        """Coefficients (in the outer variable) of (p(x) - p(t)) / (x - t).

        Returns a list q[0..n-1] of ring elements with
        (x - t) * sum q[i] x^i = p(x) mod p(t); used to resolve 1/(x - t)
        into a polynomial over p(x).
        """
        c = self.modulus.coeffs
        n = self.n
        out = []
        for i in range(n):
            p = Poly(tuple(c[i + 1:]))  # sum_{j>i} c_j t^(j-1-i)
            out.append(self.elem(p))
        return out


class QRElem:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: QuotientRing, coeffs):
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.ring = ring
        self.coeffs = tuple(coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, QRElem):
            return self.ring.modulus == other.ring.modulus and self.coeffs == other.coeffs
        if not other:
            return not self.coeffs
        return self.coeffs == (Rat(other),)

    def __hash__(self):
        return hash((self.ring.modulus.coeffs, self.coeffs))

    def __repr__(self):
        return "QRElem(%s)" % (", ".join(str(c) for c in self.coeffs) or "0")

    def _coerce(self, other):
        if isinstance(other, QRElem):
            return other
        return QRElem(self.ring, (Rat(other),))

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return QRElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return QRElem(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QRElem):
            return QRElem(self.ring, [c * other for c in self.coeffs])
        prod = Poly(self.coeffs) * Poly(other.coeffs)
        return QRElem(self.ring, (prod % self.ring.modulus).coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, QRElem):
            return QRElem(self.ring, [c / Rat(other) for c in self.coeffs])
        return self * self.ring.inverse(other)

    def __rtruediv__(self, other):
        return self.ring.inverse(self) * other

    def __pow__(self, n):
        if n < 0:
            return self.ring.inverse(self) ** (-n)
        acc = self.ring.one
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def inverse(self):
        return self.ring.inverse(self)

    def as_poly(self) -> Poly:
        return Poly(self.coeffs)


def trace_sum(p: Poly, f: RatFunc):
    """Exact sum of f over the roots of the squarefree polynomial p.

    Computed as the trace of multiplication by f on Q[t]/(p); f must have no
    pole at any root of p (i.e. gcd(den(f), p) = 1).
    """
    if not p.is_squarefree():
        raise ValueError("trace_sum requires a squarefree polynomial")
    ring = QuotientRing(p)
    try:
        el = ring.eval_ratfunc(f)
    except NeedSplit as exc:
        raise ValueError("f has a pole at a root of p (common factor %r)" % exc.factor)
    except ZeroDivisionError:
        raise ValueError("f has a pole at every root of p")
    return ring.trace(el)
