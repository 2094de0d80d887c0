"""Truncated Laurent series in one local coordinate.

A series knows the window [lo, hi] of exponents on which its coefficients
are meaningful: everything below lo is exactly zero, everything above hi is
unknown.  hi=None marks an exact (polynomial-like) object.  Reading past the
cap raises CapError instead of silently returning zero; under-truncation must
surface, not corrupt downstream extractions.

Coefficients may live in any commutative ring (rationals, quotient-ring
elements, nested series) supporting +, *, unary -, * by ints, and truthiness
as a zero test.
"""

from __future__ import annotations

from .rationals import Rat


class CapError(Exception):
    """A coefficient beyond the known truncation window was requested."""


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LSeries:
    __slots__ = ("lo", "hi", "coeffs", "zero")

    def __init__(self, lo, coeffs, hi, zero=None):
        self.zero = Rat(0) if zero is None else zero
        coeffs = list(coeffs)
        # normalize: drop exactly-zero leading terms to keep lo the true order bound
        while coeffs and not coeffs[0]:
            coeffs.pop(0)
            lo += 1
        if hi is not None:
            coeffs = coeffs[: max(0, hi - lo + 1)]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.lo = lo
        self.hi = hi
        self.coeffs = tuple(coeffs)

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero_series(hi=None, zero=None):
        return LSeries(0, (), hi, zero)

    @staticmethod
    def const(c, hi=None):
        return LSeries(0, (c,), hi, c * 0)

    @staticmethod
    def var(hi=None, one=None):
        one = Rat(1) if one is None else one
        return LSeries(1, (one,), hi, one * 0)

    # -- inspection ------------------------------------------------------------

    def order(self):
        """Exponent of the first nonzero coefficient (None for zero series)."""
        return self.lo if self.coeffs else None

    def __getitem__(self, k):
        if self.hi is not None and k > self.hi:
            raise CapError("coefficient %d beyond cap %d" % (k, self.hi))
        if k < self.lo or k >= self.lo + len(self.coeffs):
            return self.zero
        return self.coeffs[k - self.lo]

    def known(self, k):
        return self.hi is None or k <= self.hi

    def items(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.lo + i, c

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, LSeries):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.lo, self.hi, self.coeffs))

    def __repr__(self):
        terms = ", ".join("%s*z^%d" % (c, k) for k, c in self.items())
        return "LSeries[%s; window %s..%s]" % (terms or "0", self.lo, self.hi)

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries(0, (other,), None, self.zero)
        hi = _min_cap(self.hi, other.hi)
        lo = min(self.lo, other.lo) if (self.coeffs and other.coeffs) else (
            other.lo if other.coeffs else self.lo)
        if not self.coeffs:
            return LSeries(other.lo, other.coeffs, hi, self.zero)
        if not other.coeffs:
            return LSeries(self.lo, self.coeffs, hi, self.zero)
        top = max(self.lo + len(self.coeffs), other.lo + len(other.coeffs)) - 1
        out = [self[k] if self.known(k) and k >= self.lo else self.zero for k in range(lo, top + 1)]
        for i, k in enumerate(range(lo, top + 1)):
            if other.known(k) and other.lo <= k:
                out[i] = out[i] + other[k]
        return LSeries(lo, out, hi, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return LSeries(self.lo, [-c for c in self.coeffs], self.hi, self.zero)

    def __sub__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries(0, (other,), None, self.zero)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LSeries):
            return LSeries(self.lo, [c * other for c in self.coeffs], self.hi, self.zero)
        if not self.coeffs or not other.coeffs:
            hi = _min_cap(
                None if self.hi is None else self.hi + (other.lo if other.coeffs else 0),
                None if other.hi is None else other.hi + (self.lo if self.coeffs else 0))
            return LSeries(0, (), hi, self.zero)
        hi = _min_cap(None if self.hi is None else self.hi + other.lo,
                      None if other.hi is None else other.hi + self.lo)
        lo = self.lo + other.lo
        top = lo + len(self.coeffs) + len(other.coeffs) - 2
        if hi is not None:
            top = min(top, hi)
        out = [self.zero] * (top - lo + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= len(out):
                    break
                if b:
                    out[k] = out[k] + a * b
        return LSeries(lo, out, hi, self.zero)

    __rmul__ = __mul__

    def shift(self, k):
        return LSeries(self.lo + k, self.coeffs, None if self.hi is None else self.hi + k, self.zero)

    def truncate(self, hi):
        return LSeries(self.lo, self.coeffs, _min_cap(self.hi, hi), self.zero)

    def inverse(self, invert=None):
        """Multiplicative inverse; `invert` maps a ring element to its inverse."""
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero series")
        invert = invert or (lambda c: 1 / c)
        v = self.lo
        c0 = self.coeffs[0]
        c0inv = invert(c0)
        if self.hi is None:
            if len(self.coeffs) != 1:
                raise ValueError("truncate an exact series before inverting")
            return LSeries(-v, (c0inv,), None, self.zero)
        n = self.hi - v + 1
        out = [self.zero] * n
        out[0] = c0inv
        for k in range(1, n):
            acc = self.zero
            for j in range(1, min(k, len(self.coeffs) - 1) + 1):
                cj = self.coeffs[j]
                if cj:
                    acc = acc + cj * out[k - j]
            out[k] = -(c0inv * acc)
        hi = None if self.hi is None else self.hi - 2 * v
        return LSeries(-v, out, hi, self.zero)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = LSeries(0, (self.zero + 1,), self.hi if n else None, self.zero)
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else result * base
                first = False
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus -------------------------------------------------------------

    def derivative(self):
        out = [c * (self.lo + i) for i, c in enumerate(self.coeffs)]
        return LSeries(self.lo - 1, out, None if self.hi is None else self.hi - 1, self.zero)

    def integrate(self):
        """Antiderivative with zero constant term; the residue term must vanish."""
        out = []
        for i, c in enumerate(self.coeffs):
            k = self.lo + i
            if k == -1:
                if c:
                    raise ValueError("cannot integrate: nonzero residue coefficient")
                out.append(self.zero)
            else:
                out.append(c * Rat(1, k + 1))
        return LSeries(self.lo + 1, out, None if self.hi is None else self.hi + 1, self.zero)

    def compose(self, inner, invert=None):
        """self(inner(z)); inner must have positive order."""
        if inner.coeffs and inner.lo < 1:
            raise ValueError("composition requires inner series of positive order")
        neg = [(k, c) for k, c in self.items() if k < 0]
        hi = self.hi
        if inner.hi is not None:
            hi = _min_cap(hi, inner.hi)
        acc = LSeries(0, (), hi, self.zero)
        if self.lo >= 0:
            nonneg = list(self.coeffs)
            lead_pad = self.lo
        else:
            nonneg = list(self.coeffs[-self.lo:]) if len(self.coeffs) > -self.lo else []
            lead_pad = 0
        if nonneg:
            horner = LSeries(0, (nonneg[-1],), hi, self.zero)
            for c in reversed(nonneg[:-1]):
                horner = horner * inner + c
            if lead_pad:
                horner = horner * inner ** lead_pad
            acc = acc + horner
        if neg:
            inv = inner.inverse(invert)
            for k, c in neg:
                acc = acc + (inv ** (-k)) * c
        return acc

    def exp(self):
        """exp of a series with positive order."""
        if self.coeffs and self.lo < 1:
            raise ValueError("exp requires positive order")
        if not self.coeffs:
            return LSeries(0, (self.zero + 1,), self.hi, self.zero)
        hi = self.hi
        if hi is None:
            raise ValueError("truncate an exact series before exponentiating")
        one = self.zero + 1
        acc = LSeries(0, (one,), hi, self.zero)
        term = LSeries(0, (one,), hi, self.zero)
        k = 1
        while True:
            term = term * self * Rat(1, k)
            if not term.coeffs or (term.order() is not None and term.order() > hi):
                break
            acc = acc + term
            k += 1
        return acc

    def log(self, invert=None):
        """log of a unit series with constant term 1 (or any invertible constant
        term if the scale is factored out by the caller)."""
        if not self.coeffs or self.lo != 0:
            raise ValueError("log requires a unit series")
        c0 = self.coeffs[0]
        if not (c0 == 1):
            raise ValueError("log requires constant term 1")
        u = self - 1
        if u.coeffs and u.lo < 1:
            raise ValueError("log argument must be 1 + (positive order)")
        hi = self.hi
        if hi is None:
            if not u.coeffs:
                return LSeries(0, (), None, self.zero)
            raise ValueError("truncate an exact series before taking log")
        acc = LSeries(0, (), hi, self.zero)
        term = LSeries(0, (self.zero + 1,), hi, self.zero)
        k = 1
        while True:
            term = term * u
            if not term.coeffs or (term.order() is not None and term.order() > hi):
                break
            acc = acc + term * Rat((-1) ** (k + 1), k)
            k += 1
        return acc

    def reversion(self, invert=None):
        """Compositional inverse of a series c1*z + ... with invertible c1."""
        if not self.coeffs or self.lo != 1:
            raise ValueError("reversion requires order exactly 1")
        if self.hi is None:
            raise ValueError("reversion requires a finite cap")
        invert = invert or (lambda c: 1 / c)
        n = self.hi
        c1inv = invert(self.coeffs[0])
        out = [self.zero] * n  # coefficient of z^(i+1)
        out[0] = c1inv
        for order in range(2, n + 1):
            h = LSeries(1, out[: order - 1], order, self.zero)
            val = self.compose(h, invert)
            err = val[order] if val.known(order) else self.zero
            out[order - 1] = -(c1inv * err)
        return LSeries(1, out, n, self.zero)
