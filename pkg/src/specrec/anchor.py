"""Series expansions at the anchor point, in the X coordinate.

X is reconstructed from dlog X through X(z) = (z-O) · exp ∫ (dlogX - 1/(z-O)),
normalized to unit derivative at the anchor unless an explicit X fixes the
scale.  Correlator entries expand factor by factor, so arity-6 tables stay
sums of outer products of univariate series.
"""

from __future__ import annotations

from .curve import SpectralCurveSpec
from .mseries import MSeries
from .poly import Poly
from .rationals import Rat
from .ratfunc import RatFunc
from .series import LSeries
from .tensorsum import MRat, SepSeries


class AnchorError(ValueError):
    pass


class AnchorFrame:
    def __init__(self, curve: SpectralCurveSpec, cap: int):
        if curve.anchor is None:
            raise AnchorError("anchor expansions need a curve with an anchor")
        self.curve = curve
        self.cap = cap
        a = curve.anchor
        self.point = a
        sing = RatFunc(Poly((Rat(1),)), Poly((-a, Rat(1))))
        reg = curve.dlogX - sing
        reg_loc = reg.local_series(a, cap + 2)
        if reg_loc.coeffs and reg_loc.order() < 0:
            raise AnchorError("dlogX minus its anchor pole is singular at the anchor")
        scale = Rat(1)
        if curve.X_explicit is not None:
            scale = curve.X_explicit.local_series(a, 1)[1]
        growth = reg_loc.truncate(cap - 1).integrate()
        self.x_of_zeta = (LSeries(1, (Rat(1),), cap) * growth.truncate(cap - 1).exp()
                          ).truncate(cap) * scale
        self.zeta_of_x = self.x_of_zeta.reversion()
        self._series = {}

    def series_of(self, f: RatFunc) -> LSeries:
        """f(z(X)) as a series in X up to the cap."""
        got = self._series.get(f)
        if got is None:
            loc = f.local_series(self.point, self.cap)
            got = loc.compose(self.zeta_of_x)
            self._series[f] = got
        return got

    def y_series(self) -> LSeries:
        return self.series_of(self.curve.y)

    def inv_dlog_series(self) -> LSeries:
        """1/dlogX composed to the anchor coordinate; vanishes at order 1."""
        inv = RatFunc(self.curve.dlogX.den, self.curve.dlogX.num)
        s = self.series_of(inv)
        if s.order() != 1:
            raise AnchorError("1/dlogX must vanish to first order at the anchor")
        return s

    # -- correlator expansion -----------------------------------------------------

    def expand_entry(self, entry: MRat, caps=None) -> SepSeries:
        caps = caps or (self.cap,) * entry.arity
        out = SepSeries(entry.arity, caps)
        for key, coeff in entry.terms.items():
            factors = []
            dead = False
            for i, f in enumerate(key):
                if f is None:
                    factors.append(None)
                    continue
                s = self.series_of(f).truncate(caps[i])
                if not s.coeffs:
                    dead = True
                    break
                factors.append(s)
            if not dead:
                out.add_term(coeff, factors)
        return out

    def pair_correction_mseries(self, cap: int, names=("X1", "X2")) -> MSeries:
        """Series of W(0,2) minus X1 X2/(X1-X2)^2: positive orders only.

        The bracket inv_d(X1) inv_d(X2) / U^2 - X1 X2 (with z(X1)-z(X2) =
        (X1-X2) U) is divisible by (X1-X2)^2; the quotient is produced by an
        exact total-degree recurrence, with the bracket computed at doubled
        caps so every needed coefficient is available.
        """
        icap = 2 * cap + 2
        if self.cap < icap + 2:
            frame = AnchorFrame(self.curve, icap + 2)
        else:
            frame = self
        a_coeffs = frame.zeta_of_x
        windows = ((0, icap), (0, icap))
        u_terms = {}
        for k in range(1, icap + 2):
            ak = a_coeffs[k] if a_coeffs.known(k) else None
            if ak is None or not ak:
                continue
            for i in range(k):
                if i <= icap and k - 1 - i <= icap:
                    u_terms[(i, k - 1 - i)] = ak
        u_series = MSeries(names, windows, u_terms)
        inv_d = frame.inv_dlog_series()
        d1 = MSeries.from_lseries(inv_d.truncate(icap + 1), names[0]).lift(names)
        d2 = MSeries.from_lseries(inv_d.truncate(icap + 1), names[1]).lift(names)
        bracket = d1 * d2 * (u_series * u_series).unit_inverse() \
            - MSeries.monomial(Rat(1), names, (1, 1))

        def bval(i, j):
            if i < 0 or j < 0 or i > icap or j > icap:
                return Rat(0)
            return bracket.terms.get((i, j) if bracket.vars == names else (j, i), Rat(0))

        if bracket.vars != tuple(sorted(names)):
            raise AnchorError("unexpected variable order")
        q = {}

        def qval(a, b):
            return q.get((a, b), Rat(0))

        for d in range(0, 2 * cap + 1):
            for a in range(0, d + 1):
                b = d - a
                val = bval(a, b + 2) + 2 * qval(a - 1, b + 1) - qval(a - 2, b + 2)
                if val:
                    q[(a, b)] = val
        out_terms = {}
        for (a, b), c in q.items():
            if 1 <= a <= cap and 1 <= b <= cap:
                out_terms[(a, b)] = c
            elif (a == 0 or b == 0) and a <= cap and b <= cap and c:
                raise AnchorError("two-point correction retained boundary terms")
        return MSeries(names, ((1, cap), (1, cap)), out_terms)

    def pair_correction_sep(self, cap: int) -> SepSeries:
        """The same correction as a sum of outer products (rank <= cap)."""
        ms = self.pair_correction_mseries(cap)
        i1 = ms.vars.index("X1")
        i2 = ms.vars.index("X2")
        rows = {}
        for e, c in ms.terms.items():
            rows.setdefault(e[i1], {})[e[i2]] = c
        out = SepSeries(2, (cap, cap))
        for k1, row in sorted(rows.items()):
            kmax = max(row)
            coeffs = [row.get(k, Rat(0)) for k in range(min(row), kmax + 1)]
            s2 = LSeries(min(row), coeffs, cap)
            s1 = LSeries(k1, (Rat(1),), cap)
            out.add_term(Rat(1), (s1, s2))
        return out


def expansion_table(frame: AnchorFrame, table, caps_fn=None) -> dict:
    """Anchor-series form of every stable entry of a correlator table."""
    out = {}
    for (g, m), entry in sorted(table.entries.items()):
        caps = caps_fn(g, m) if caps_fn else None
        out[(g, m)] = frame.expand_entry(entry, caps)
    return out
