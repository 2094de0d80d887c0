"""Sparse multivariate truncated (Laurent) series with per-variable windows.

Each variable carries a window (lo, hi): exponents below lo are exactly zero,
coefficients above hi are unknown (hi=None means exact in that variable).
Reading beyond a cap raises CapError; arithmetic propagates the windows so
under-truncation is detected rather than silently zero-extended.
"""

from __future__ import annotations

from .rationals import Rat
from .series import CapError, LSeries, _min_cap


class MSeries:
    __slots__ = ("vars", "windows", "terms")

    def __init__(self, vars, windows, terms):
        self.vars = tuple(vars)
        self.windows = tuple(windows)
        self.terms = {e: c for e, c in terms.items() if c}

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(vars=(), windows=None):
        vars = tuple(vars)
        if windows is None:
            windows = tuple((0, None) for _ in vars)
        return MSeries(vars, windows, {})

    @staticmethod
    def const(c, vars=(), windows=None):
        out = MSeries.zero(vars, windows)
        if c:
            out.terms[(0,) * len(out.vars)] = c
        return out

    @staticmethod
    def monomial(c, vars, exponents, windows=None):
        vars = tuple(vars)
        if windows is None:
            windows = tuple((min(e, 0), None) for e in exponents)
        return MSeries(vars, windows, {tuple(exponents): c} if c else {})

    @staticmethod
    def from_lseries(s: LSeries, var: str):
        return MSeries((var,), ((s.lo, s.hi),), {(k,): c for k, c in s.items()})

    def to_lseries(self, zero=None) -> LSeries:
        if len(self.vars) != 1:
            raise ValueError("to_lseries requires exactly one variable")
        lo, hi = self.windows[0]
        if not self.terms:
            return LSeries(lo, (), hi, zero)
        kmin = min(e[0] for e in self.terms)
        kmax = max(e[0] for e in self.terms)
        z = zero if zero is not None else Rat(0)
        coeffs = [self.terms.get((k,), z) for k in range(kmin, kmax + 1)]
        return LSeries(kmin, coeffs, hi, z)

    # -- bookkeeping -------------------------------------------------------------

    def window(self, var):
        return self.windows[self.vars.index(var)]

    def lift(self, vars, windows=None):
        """Reindex over a superset of variables (missing ones exact at order 0)."""
        vars = tuple(vars)
        wmap = dict(zip(self.vars, self.windows))
        if windows is None:
            new_windows = tuple(wmap.get(v, (0, None)) for v in vars)
        else:
            new_windows = tuple(windows)
        pos = {v: i for i, v in enumerate(vars)}
        idx = [pos[v] for v in self.vars]
        terms = {}
        for e, c in self.terms.items():
            ee = [0] * len(vars)
            for i, k in zip(idx, e):
                ee[i] = k
            terms[tuple(ee)] = c
        return MSeries(vars, new_windows, terms)

    def aligned(self, other: "MSeries"):
        if self.vars == other.vars:
            return self, other
        vars_m = tuple(sorted(set(self.vars) | set(other.vars)))
        return self.lift(vars_m), other.lift(vars_m)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MSeries):
            return NotImplemented
        a, b = self.aligned(other)
        return a.terms == b.terms

    def __repr__(self):
        items = sorted(self.terms.items())[:8]
        body = " + ".join("%s*%s" % (c, dict(zip(self.vars, e))) for e, c in items)
        more = "" if len(self.terms) <= 8 else " + ... (%d terms)" % len(self.terms)
        return "MSeries[%s%s]" % (body or "0", more)

    # -- coefficient access ---------------------------------------------------------

    def coeff(self, **exponents):
        """Exact coefficient with all variables fixed; raises CapError past caps."""
        e = []
        for v, (lo, hi) in zip(self.vars, self.windows):
            k = exponents.pop(v)
            if hi is not None and k > hi:
                raise CapError("exponent %d of %s beyond cap %d" % (k, v, hi))
            e.append(k)
        if exponents:
            raise KeyError("unknown variables %s" % list(exponents))
        return self.terms.get(tuple(e), Rat(0))

    def extract(self, var, k) -> "MSeries":
        """Coefficient of var^k as a series in the remaining variables."""
        i = self.vars.index(var)
        lo, hi = self.windows[i]
        if hi is not None and k > hi:
            raise CapError("exponent %d of %s beyond cap %d" % (k, var, hi))
        rest_vars = self.vars[:i] + self.vars[i + 1:]
        rest_win = self.windows[:i] + self.windows[i + 1:]
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                terms[e[:i] + e[i + 1:]] = c
        return MSeries(rest_vars, rest_win, terms)

    def var_range(self, var):
        i = self.vars.index(var)
        if not self.terms:
            return None
        ks = [e[i] for e in self.terms]
        return min(ks), max(ks)

    # -- arithmetic -----------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MSeries):
            other = MSeries.const(Rat(other))
        a, b = self.aligned(other)
        win_m = tuple((min(la, lb), _min_cap(ha, hb))
                      for (la, ha), (lb, hb) in zip(a.windows, b.windows))
        terms = dict(a.terms)
        for e, c in b.terms.items():
            acc = terms.get(e)
            s = c if acc is None else acc + c
            if s:
                terms[e] = s
            elif acc is not None:
                del terms[e]
        return MSeries(a.vars, win_m, terms)

    __radd__ = __add__

    def __neg__(self):
        return MSeries(self.vars, self.windows, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MSeries):
            other = MSeries.const(Rat(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if not c:
            return MSeries(self.vars, self.windows, {})
        return MSeries(self.vars, self.windows, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MSeries):
            return self.scale(other)
        a, b = self.aligned(other)
        nv = len(a.vars)
        win = []
        for i in range(nv):
            la, ha = a.windows[i]
            lb, hb = b.windows[i]
            ha2 = None if ha is None else ha + lb
            hb2 = None if hb is None else hb + la
            win.append((la + lb, _min_cap(ha2, hb2)))
        caps = [w[1] for w in win]
        terms = {}
        big, small = (a.terms, b.terms) if len(a.terms) >= len(b.terms) else (b.terms, a.terms)
        for e1, c1 in big.items():
            for e2, c2 in small.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                skip = False
                for i in range(nv):
                    if caps[i] is not None and e[i] > caps[i]:
                        skip = True
                        break
                if skip:
                    continue
                acc = terms.get(e)
                s = c1 * c2 if acc is None else acc + c1 * c2
                if s:
                    terms[e] = s
                elif acc is not None:
                    del terms[e]
        return MSeries(tuple(a.vars), tuple(win), terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a multivariate series")
        acc = MSeries.const(Rat(1), self.vars, self.windows)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base if n > 1 else base
            n >>= 1
        return acc

    # -- structural operations ----------------------------------------------------------

    def truncate(self, var, hi) -> "MSeries":
        i = self.vars.index(var)
        lo, old = self.windows[i]
        win = list(self.windows)
        win[i] = (lo, _min_cap(old, hi))
        cap = win[i][1]
        terms = {e: c for e, c in self.terms.items() if cap is None or e[i] <= cap}
        return MSeries(self.vars, win, terms)

    def set_window(self, var, lo, hi) -> "MSeries":
        i = self.vars.index(var)
        win = list(self.windows)
        win[i] = (lo, hi)
        terms = {e: c for e, c in self.terms.items()
                 if e[i] >= lo and (hi is None or e[i] <= hi)}
        return MSeries(self.vars, win, terms)

    def rename(self, mapping) -> "MSeries":
        new_vars = [mapping.get(v, v) for v in self.vars]
        if len(set(new_vars)) != len(new_vars):
            raise ValueError("rename collision; use merge_vars to identify variables")
        order = sorted(range(len(new_vars)), key=lambda i: new_vars[i])
        vars_s = tuple(new_vars[i] for i in order)
        win_s = tuple(self.windows[i] for i in order)
        terms = {tuple(e[i] for i in order): c for e, c in self.terms.items()}
        return MSeries(vars_s, win_s, terms)

    def merge_vars(self, src, dst) -> "MSeries":
        """Identify variable src with dst (exponents add)."""
        i = self.vars.index(src)
        j = self.vars.index(dst)
        li, hi_ = self.windows[i]
        lj, hj = self.windows[j]
        rest_vars = tuple(v for k, v in enumerate(self.vars) if k != i)
        win = list(w for k, w in enumerate(self.windows) if k != i)
        win[rest_vars.index(dst)] = (li + lj, _min_cap(
            None if hi_ is None else hi_ + lj, None if hj is None else hj + li))
        terms = {}
        for e, c in self.terms.items():
            ee = list(e)
            ee[j] += ee[i]
            del ee[i]
            key = tuple(ee)
            acc = terms.get(key)
            s = c if acc is None else acc + c
            if s:
                terms[key] = s
            elif acc is not None:
                del terms[key]
        return MSeries(rest_vars, tuple(win), terms)

    def drop_var(self, var) -> "MSeries":
        """Remove a variable that no longer occurs (all exponents zero)."""
        i = self.vars.index(var)
        for e in self.terms:
            if e[i] != 0:
                raise ValueError("variable %s still occurs" % var)
        return MSeries(self.vars[:i] + self.vars[i + 1:],
                       self.windows[:i] + self.windows[i + 1:],
                       {e[:i] + e[i + 1:]: c for e, c in self.terms.items()})

    def diag_apply(self, var, weight) -> "MSeries":
        """Multiply the coefficient of var^k by weight(k) (scalar or series)."""
        i = self.vars.index(var)
        out = MSeries(self.vars, self.windows, {})
        acc = out
        plain = {}
        for e, c in self.terms.items():
            w = weight(e[i])
            if isinstance(w, MSeries):
                acc = acc + MSeries(self.vars, self.windows, {e: c}) * w
            else:
                if w:
                    plain[e] = c * w
        return acc + MSeries(self.vars, self.windows, plain)

    def substitute(self, var, series: "MSeries", neg_ok=False) -> "MSeries":
        """Substitute a series for var; series must not contain var unless it is
        a pure rescaling.  Exponents of var may be negative when neg_ok and the
        series is invertible (single-term leading part handled via unit_inverse)."""
        i = self.vars.index(var)
        groups = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            groups.setdefault(k, {})[rest] = c
        base = MSeries(self.vars, tuple((0, w[1]) if j == i else w
                                        for j, w in enumerate(self.windows)), {})
        out = None
        pow_cache = {}

        def spow(k):
            if k in pow_cache:
                return pow_cache[k]
            if k == 0:
                val = MSeries.const(Rat(1))
            elif k > 0:
                val = spow(k - 1) * series
            else:
                inv = pow_cache.get("inv")
                if inv is None:
                    inv = series.unit_inverse()
                    pow_cache["inv"] = inv
                val = spow(k + 1) * inv
            pow_cache[k] = val
            return val

        for k, terms in groups.items():
            if k < 0 and not neg_ok:
                raise ValueError("negative exponent of %s in substitution" % var)
            piece = MSeries(base.vars, base.windows, terms) * spow(k)
            out = piece if out is None else out + piece
        if out is None:
            out = base
        if var in out.vars:
            rng = out.var_range(var)
            if rng is not None and (rng[0] != 0 or rng[1] != 0):
                return out
            out = out.drop_var(var) if var not in series.vars else out
        return out

    def unit_inverse(self, grading=None, max_iter=None, invert=None) -> "MSeries":
        """Inverse of a series whose lowest term is a single invertible monomial.

        With `grading` (an iterable of variable names) the leading term is the
        unique one of minimal degree in those variables and every other term
        must exceed it there; this is how formally-graded units (couplings,
        auxiliary expansion variables) are inverted when other exponents may
        be negative.  `invert` supplies coefficient inverses for non-rational
        coefficient rings.
        """
        if not self.terms:
            raise ZeroDivisionError("inverse of zero series")
        if grading is None:
            def keyfun(e):
                return (sum(e), e)
        else:
            gidx = [self.vars.index(v) for v in grading]

            def keyfun(e):
                return (sum(e[i] for i in gidx), e)
        e0 = min(self.terms, key=keyfun)
        c0 = self.terms[e0]
        c0_inv = (1 / c0) if invert is None else invert(c0)
        rest = MSeries(self.vars, self.windows,
                       {e: c for e, c in self.terms.items() if e != e0})
        inv_windows = tuple((-k, None if hi is None else hi - 2 * k)
                            for k, (lo, hi) in zip(e0, self.windows))
        lead_inv = MSeries(self.vars, inv_windows, {tuple(-k for k in e0): c0_inv})
        if not rest.terms:
            return lead_inv
        g = rest * lead_inv  # strictly positive in the chosen grading
        base = keyfun((0,) * len(self.vars))[0]
        for e in g.terms:
            if keyfun(e)[0] <= base:
                raise ValueError("series not invertible as a truncated unit")
        acc = MSeries.const(Rat(1), g.vars, g.windows)
        term = acc
        if max_iter is not None:
            bound = max_iter
        elif grading is None:
            bound = _iter_bound(g)
        else:
            bound = 0
            for v in grading:
                lo, hi = g.window(v)
                if hi is None:
                    raise ValueError("grading variables must be capped")
                bound += hi - min(lo, 0)
            bound = max(bound + 2, 4)
        k = 0
        while k < bound:
            term = term * g
            if not term.terms:
                break
            acc = acc - term if k % 2 == 0 else acc + term
            k += 1
        else:
            if term.terms:
                raise ValueError("unit_inverse did not terminate within windows")
        return acc * lead_inv

    def exp(self, grading_var) -> "MSeries":
        """exp of a series each of whose terms is positive in grading_var."""
        i = self.vars.index(grading_var)
        for e in self.terms:
            if e[i] < 1:
                raise ValueError("exp requires positive %s-order" % grading_var)
        lo, hi = self.windows[i]
        if hi is None:
            raise ValueError("exp requires a finite %s cap" % grading_var)
        acc = MSeries.const(Rat(1), self.vars, self.windows)
        term = acc
        k = 1
        while True:
            term = term * self.scale(Rat(1, k))
            if not term.terms:
                break
            acc = acc + term
            k += 1
        return acc

    def map_terms(self, fn) -> "MSeries":
        """fn(exponent_tuple, coeff) -> coeff; drops zeros."""
        return MSeries(self.vars, self.windows,
                       {e: fn(e, c) for e, c in self.terms.items()})


def _iter_bound(g: MSeries) -> int:
    # each multiplication by g raises the total degree by >= 1 within windows
    total = 0
    for lo, hi in g.windows:
        if hi is not None:
            total += hi - min(lo, 0)
    return max(total + 2, 4)


def lseries_in(var, s: LSeries) -> MSeries:
    return MSeries.from_lseries(s, var)
