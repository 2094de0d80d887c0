"""Dense univariate polynomials over an arbitrary commutative coefficient ring.

Coefficients are stored lowest degree first with no trailing zeros.  Any
object with ring arithmetic (+, -, *, and * by python ints) works as a
coefficient; rationals are the common case.  Division, gcd and resultants
additionally require coefficient division (a field, or at least the needed
inverses to exist).
"""

from __future__ import annotations

from .rationals import Rat, rat, parse_rat, format_rat


def _trim(coeffs):
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Immutable dense polynomial.  The zero polynomial has empty coeffs."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _trim(list(coeffs))

    @staticmethod
    def const(c):
        return Poly((c,))

    @staticmethod
    def x(ring_one=None):
        one = Rat(1) if ring_one is None else ring_one
        return Poly((one * 0, one))

    @staticmethod
    def from_rats(values):
        return Poly([rat(v) if not isinstance(v, (list, tuple)) else rat(*v) for v in values])

    @staticmethod
    def parse(values):
        """Ascending coefficient list of "p/q" strings (or numbers)."""
        out = []
        for v in values:
            out.append(parse_rat(v) if isinstance(v, str) else rat(v))
        return Poly(out)

    # -- basic structure ---------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def lead(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Rat(0)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if not other:
            return not self.coeffs
        return self.coeffs == (other,) if len(self.coeffs) <= 1 else False

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        return "Poly(%s)" % ", ".join(str(c) for c in self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly((other,))
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly((other,)).__neg__())

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [a[0] * 0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly((Rat(1),)) if not self.coeffs else Poly((self.coeffs[0] * 0 + 1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        return Poly([a * c for a in self.coeffs])

    # -- evaluation and calculus -------------------------------------------

    def eval(self, x):
        """Horner evaluation; x may live in any ring containing the coefficients."""
        if not self.coeffs:
            return x * 0
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def compose(self, other):
        if not isinstance(other, Poly):
            raise TypeError("compose expects a Poly")
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + Poly((c,))
        return acc

    def shift(self, a):
        """Taylor shift: p(x + a)."""
        return self.compose(Poly((a, a * 0 + 1)))

    def derivative(self, order=1):
        p = self
        for _ in range(order):
            p = Poly([c * k for k, c in enumerate(p.coeffs)][1:])
        return p

    # -- field-coefficient operations ---------------------------------------

    def monic(self):
        if not self.coeffs:
            return self
        inv = 1 / self.lead()
        return Poly([c * inv for c in self.coeffs])

    def divmod(self, other):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        inv = 1 / other.lead()
        quot = [other.lead() * 0] * (dq + 1)
        for k in range(dq, -1, -1):
            c = rem[k + other.degree()] * inv
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return Poly(quot), Poly(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if r.coeffs:
            raise ValueError("inexact polynomial division")
        return q

    def gcd(self, other):
        a, b = self, other
        while b.coeffs:
            a, b = b, a % b
        return a.monic() if a.coeffs else a

    def squarefree_part(self):
        if self.degree() <= 0:
            return self.monic()
        g = self.gcd(self.derivative())
        return self.exact_div(g).monic() if g.degree() > 0 else self.monic()

    def is_squarefree(self):
        return self.degree() <= 0 or self.gcd(self.derivative()).degree() == 0

    def resultant(self, other):
        """res(self, other) = lc(self)^deg(other) * prod other(root of self)."""
        f, g = self, other
        if not f.coeffs or not g.coeffs:
            return Rat(0)
        sign = 1
        acc = Rat(1)
        while g.degree() > 0:
            r = f % g
            if not r.coeffs:
                return Rat(0)
            acc = acc * g.lead() ** (f.degree() - r.degree())
            if (f.degree() * g.degree()) % 2:
                sign = -sign
            f, g = g, r
        return sign * acc * g.lead() ** f.degree()

    # -- rational-coefficient helpers ----------------------------------------

    def rational_roots(self):
        """All rational roots (no multiplicity), via the rational root theorem."""
        if not self.coeffs:
            raise ValueError("zero polynomial")
        p = self
        roots = []
        while not p.coeffs[0]:
            roots.append(Rat(0))
            p = Poly(p.coeffs[1:])
            if p.degree() < 0:
                return sorted(set(roots))
        if p.degree() == 0:
            return sorted(set(roots))
        den = 1
        for c in p.coeffs:
            den = den * Rat(c).denominator // _gcd_int(den, Rat(c).denominator)
        ints = [int(Rat(c) * den) for c in p.coeffs]
        a0, an = abs(ints[0]), abs(ints[-1])
        for pp in _divisors(a0):
            for qq in _divisors(an):
                for cand in (Rat(pp, qq), Rat(-pp, qq)):
                    if not p.eval(cand):
                        roots.append(cand)
        return sorted(set(roots))

    def to_strings(self):
        return [format_rat(c) for c in self.coeffs]


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    n = abs(int(n))
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


X = Poly((Rat(0), Rat(1)))
