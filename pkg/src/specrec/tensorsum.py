"""Sums of products of univariate factors.

Multivariate correlators on genus-zero curves have denominators that split
per variable, so they are finite sums  Σ c · f_1(z_1)···f_m(z_m)  with
univariate rational factors, and their anchor expansions are sums of outer
products of univariate series.  Storing them this way keeps arity-6 objects
tractable where a dense multivariate representation would not be.

Factors are interned and canonically scaled so identical keys merge; exact
zero tests run by sequential basis reduction per variable, never by
expanding the full tensor.
"""

from __future__ import annotations

from .mseries import MSeries
from .poly import Poly
from .rationals import Rat
from .ratfunc import RatFunc
from .series import LSeries, _min_cap


class MRat:
    """Sum of products of univariate rational functions, one slot per variable."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None):
        self.arity = arity
        self.terms = dict(terms or {})  # key: tuple of (RatFunc|None) -> Rat

    @staticmethod
    def zero(arity):
        return MRat(arity)

    @staticmethod
    def const(arity, c):
        out = MRat(arity)
        if c:
            out.terms[(None,) * arity] = Rat(c)
        return out

    @staticmethod
    def from_factors(coeff, factors):
        """factors: list of RatFunc|None (None = constant 1 slot)."""
        out = MRat(len(factors))
        out.add_term(coeff, factors)
        return out

    def add_term(self, coeff, factors):
        if not coeff:
            return
        key = []
        for f in factors:
            if f is None or (f.is_poly() and f.num.degree() <= 0):
                if f is not None:
                    coeff = coeff * f.num[0]
                    if not coeff:
                        return
                key.append(None)
                continue
            scale = f.num.lead()
            coeff = coeff * scale
            key.append(_intern(RatFunc(f.num.scale(1 / scale), f.den)))
        key = tuple(key)
        acc = self.terms.get(key)
        s = coeff if acc is None else acc + coeff
        if s:
            self.terms[key] = s
        elif acc is not None:
            del self.terms[key]

    def __bool__(self):
        return bool(self.terms)

    def rank(self):
        return len(self.terms)

    def __add__(self, other):
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        out = MRat(self.arity, self.terms)
        for k, c in other.terms.items():
            acc = out.terms.get(k)
            s = c if acc is None else acc + c
            if s:
                out.terms[k] = s
            elif acc is not None:
                del out.terms[k]
        return out

    def __neg__(self):
        return MRat(self.arity, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return MRat(self.arity)
        return MRat(self.arity, {k: v * c for k, v in self.terms.items()})

    def mul(self, other: "MRat") -> "MRat":
        """Pointwise product over the same variable slots."""
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        out = MRat(self.arity)
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                factors = [_fmul(a, b) for a, b in zip(k1, k2)]
                out.add_term(c1 * c2, factors)
        return out

    def embed(self, positions, arity) -> "MRat":
        """Place slot i at positions[i] inside a larger variable list."""
        out = MRat(arity)
        for k, c in self.terms.items():
            factors = [None] * arity
            for f, p in zip(k, positions):
                factors[p] = f
            out.add_term(c, factors)
        return out

    def eval_slot(self, pos, value) -> "MRat":
        """Evaluate one variable at a rational point; arity drops by one."""
        out = MRat(self.arity - 1)
        for k, c in self.terms.items():
            f = k[pos]
            if f is not None:
                c = c * f.eval(value)
                if not c:
                    continue
            out.add_term(c, k[:pos] + k[pos + 1:])
        return out

    def derivative(self, pos) -> "MRat":
        out = MRat(self.arity)
        for k, c in self.terms.items():
            f = k[pos]
            if f is None:
                continue
            df = f.derivative()
            if not df:
                continue
            out.add_term(c, k[:pos] + (df,) + k[pos + 1:])
        return out

    def apply_slot(self, pos, fn) -> "MRat":
        """Replace factor at pos by fn(factor or 1); fn returns a RatFunc."""
        out = MRat(self.arity)
        one = RatFunc(Poly((Rat(1),)))
        for k, c in self.terms.items():
            f = k[pos] if k[pos] is not None else one
            out.add_term(c, k[:pos] + (fn(f),) + k[pos + 1:])
        return out

    def diag_merge(self, pos_src, pos_dst) -> "MRat":
        """Identify variable pos_src with pos_dst (factors multiply)."""
        out = MRat(self.arity - 1)
        for k, c in self.terms.items():
            merged = _fmul(k[pos_src], k[pos_dst])
            kk = [f for i, f in enumerate(k) if i != pos_src]
            kk[pos_dst if pos_dst < pos_src else pos_dst - 1] = merged
            out.add_term(c, kk)
        return out

    def eval_all(self, values):
        acc = Rat(0)
        for k, c in self.terms.items():
            v = c
            for f, x in zip(k, values):
                if f is not None:
                    v = v * f.eval(x)
            acc += v
        return acc

    def slot_factors(self, pos):
        return {k[pos] for k in self.terms}

    def is_zero(self) -> bool:
        return _tensor_zero(list(self.terms.items()), self.arity, _rat_vectorize)

    def equals(self, other: "MRat") -> bool:
        return (self - other).is_zero()


def _fmul(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a * b


_INTERN = {}


def _intern(f):
    got = _INTERN.get(f)
    if got is None:
        _INTERN[f] = f
        got = f
    return got


def _rat_vectorize(factors):
    """Common-denominator coefficient vectors for a list of RatFunc|None."""
    one = RatFunc(Poly((Rat(1),)))
    fs = [one if f is None else f for f in factors]
    den = Poly((Rat(1),))
    for f in fs:
        g = den.gcd(f.den)
        den = den * f.den.exact_div(g) if g.degree() > 0 else den * f.den
    vecs = []
    width = 0
    for f in fs:
        mult = den.exact_div(f.den)
        numer = f.num * mult
        vecs.append(numer.coeffs)
        width = max(width, len(numer.coeffs))
    return [tuple(v) + (Rat(0),) * (width - len(v)) for v in vecs]


def _series_vectorize(factors):
    """Aligned coefficient vectors for a list of LSeries|None over a shared window."""
    lo = 0
    hi = None
    for f in factors:
        if f is None:
            continue
        lo = min(lo, f.lo)
        hi = _min_cap(hi, f.hi)
    if hi is None:
        hi = max((f.lo + len(f.coeffs) - 1 for f in factors if f is not None), default=0)
    vecs = []
    for f in factors:
        if f is None:
            vecs.append(tuple(Rat(1) if k == 0 else Rat(0) for k in range(lo, hi + 1)))
        else:
            vecs.append(tuple(f[k] if f.known(k) and k >= f.lo else Rat(0)
                              for k in range(lo, hi + 1)))
    return vecs


def _tensor_zero(terms, arity, vectorize) -> bool:
    """Exact zero test of Σ c·⊗factors by basis reduction on the first slot."""
    terms = [(k, c) for k, c in terms if c]
    if not terms:
        return True
    if arity == 0:
        return not sum((c for _, c in terms), Rat(0))
    factors = [k[0] for k, _ in terms]
    vecs = vectorize(factors)
    # reduce the factor vectors to a basis; tails combine linearly
    basis = []   # list of (pivot_index, vector, tail_terms dict)
    for (key, coeff), vec in zip(terms, vecs):
        vec = list(vec)
        tail = {key[1:]: coeff}
        for pivot, bvec, btail in basis:
            if pivot < len(vec) and vec[pivot]:
                fac = vec[pivot]
                for i, bv in enumerate(bvec):
                    if bv:
                        vec[i] -= fac * bv
                for tk, tc in btail.items():
                    acc = tail.get(tk)
                    s = tc * fac if acc is None else acc + tc * fac
                    if s:
                        tail[tk] = s
                    elif acc is not None:
                        del tail[tk]
        pivot = next((i for i, v in enumerate(vec) if v), None)
        if pivot is None:
            continue
        inv = 1 / vec[pivot]
        vec = [v * inv for v in vec]
        tail = {k: c * inv for k, c in tail.items()}
        basis.append((pivot, vec, tail))
    # zero iff every pivot's combined tail vanishes recursively
    for _, _, tail in basis:
        if not _tensor_zero(list(tail.items()), arity - 1, vectorize):
            return False
    return True


class SepSeries:
    """Sum of outer products of univariate truncated series (anchor expansions)."""

    __slots__ = ("arity", "caps", "terms")

    def __init__(self, arity: int, caps, terms=None):
        self.arity = arity
        self.caps = tuple(caps)
        self.terms = dict(terms or {})  # tuple of (LSeries|None) -> Rat

    @staticmethod
    def zero(arity, caps):
        return SepSeries(arity, caps)

    def add_term(self, coeff, factors):
        if not coeff:
            return
        key = []
        for i, f in enumerate(factors):
            if f is None:
                key.append(None)
                continue
            f = f.truncate(self.caps[i])
            if not f.coeffs:
                return
            lead = f.coeffs[0]
            coeff = coeff * lead
            key.append(_intern(f * (1 / lead)))
        acc_key = tuple(key)
        acc = self.terms.get(acc_key)
        s = coeff if acc is None else acc + coeff
        if s:
            self.terms[acc_key] = s
        elif acc is not None:
            del self.terms[acc_key]

    def __add__(self, other):
        if self.arity != other.arity:
            raise ValueError("arity mismatch")
        caps = tuple(_min_cap(a, b) for a, b in zip(self.caps, other.caps))
        out = SepSeries(self.arity, caps)
        for k, c in list(self.terms.items()) + list(other.terms.items()):
            out.add_term(c, k)
        return out

    def __neg__(self):
        return SepSeries(self.arity, self.caps, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return SepSeries(self.arity, self.caps)
        return SepSeries(self.arity, self.caps, {k: v * c for k, v in self.terms.items()})

    def rank(self):
        return len(self.terms)

    def coefficient(self, exponents):
        acc = Rat(0)
        for k, c in self.terms.items():
            v = c
            for f, e in zip(k, exponents):
                if f is None:
                    if e != 0:
                        v = Rat(0)
                        break
                else:
                    ck = f[e]
                    if not ck:
                        v = Rat(0)
                        break
                    v = v * ck
            else:
                acc += v
        return acc

    def densify(self, var_names) -> MSeries:
        if len(var_names) != self.arity:
            raise ValueError("need one name per slot")
        windows = tuple((0, cap) for cap in self.caps)
        acc = MSeries.zero(var_names, windows)
        for k, c in self.terms.items():
            piece = MSeries.const(c, var_names, windows)
            for name, f in zip(var_names, k):
                if f is None:
                    continue
                ms = MSeries.from_lseries(f, name).lift(acc.vars, windows)
                piece = piece * ms
            acc = acc + piece
        return acc

    def map_slot(self, pos, fn) -> "SepSeries":
        """Replace factor at pos by fn(series) (series 1 substituted for None)."""
        out = SepSeries(self.arity, self.caps)
        one = LSeries(0, (Rat(1),), self.caps[pos])
        for k, c in self.terms.items():
            f = k[pos] if k[pos] is not None else one
            out.add_term(c, k[:pos] + (fn(f),) + k[pos + 1:])
        return out

    def is_zero(self) -> bool:
        return _tensor_zero(list(self.terms.items()), self.arity, _series_vectorize)

    def equals(self, other: "SepSeries") -> bool:
        return (self - other).is_zero()
