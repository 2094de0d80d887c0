"""Genus-zero spectral curves on the projective line with global coordinate z.

A curve is the data (y, dlog X, anchor O): y rational, the logarithmic
differential of X rational (X itself need not be rational), and O the point
where X has its simple zero so that X serves as the local coordinate for all
expansions.  The standard bidifferential dz1 dz2/(z1-z2)^2 is implicit.

Ramification bookkeeping never isolates roots numerically: the critical
points are carried as squarefree polynomial factors and all local data (deck
transformations, Laurent expansions) live over Q[t]/(factor).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .poly import Poly, X as ZPOLY
from .quotient import QuotientRing
from .rationals import Rat
from .ratfunc import INFINITY, RatFunc
from .series import LSeries


class CurveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# psi data


class PsiSpec:
    """psi(θ) = P(θ) + log R(θ) with P(0) = 0 and R(0) = 1.

    P is a polynomial, R a rational function; the pair also generates the
    ħ-deformed version via the sinh-kernel acting on P.
    """

    def __init__(self, P: Poly, R_num: Poly, R_den: Poly):
        if not isinstance(P, Poly):
            P = Poly.from_rats(P)
        if not isinstance(R_num, Poly):
            R_num = Poly.from_rats(R_num)
        if not isinstance(R_den, Poly):
            R_den = Poly.from_rats(R_den)
        if P.coeffs and P[0]:
            raise CurveError("P(0) must vanish")
        r0n, r0d = R_num[0], R_den[0]
        if not r0n or not r0d:
            raise CurveError("R(0) must be finite and nonzero")
        g = R_num.gcd(R_den)
        if g.degree() > 0:
            R_num = R_num.exact_div(g)
            R_den = R_den.exact_div(g)
        self.P = P
        # normalize so that R(0) = 1 exactly
        self.R_num = R_num.scale(R_den[0] / R_num[0])
        self.R_den = R_den

    @staticmethod
    def zero():
        return PsiSpec(Poly(), Poly((Rat(1),)), Poly((Rat(1),)))

    def is_zero(self):
        return self.P.is_zero() and self.R_num == self.R_den

    @property
    def R(self) -> RatFunc:
        return RatFunc(self.R_num, self.R_den)

    def psi_prime(self) -> RatFunc:
        """psi'(θ) = P'(θ) + R'(θ)/R(θ), a rational function of θ."""
        return RatFunc(self.P.derivative()) + RatFunc(
            self.R_num.derivative() * self.R_den - self.R_num * self.R_den.derivative(),
            self.R_num * self.R_den)

    def shifted(self, a) -> "PsiSpec":
        """psi(θ+a) - psi(a), keeping the normalization at θ=0."""
        a = Rat(a)
        P2 = self.P.shift(a)
        P2 = P2 - Poly((P2[0],))
        num2 = self.R_num.shift(a)
        den2 = self.R_den.shift(a)
        if not num2[0] or not den2[0]:
            raise CurveError("psi singular at the shift point")
        return PsiSpec(P2, num2, den2)

    def psi_theta_series(self, hi: int) -> LSeries:
        """psi(θ) as a series at θ=0 (log R expanded; P exact)."""
        logr = LSeries(0, self.R_num.coeffs, hi) * LSeries(0, self.R_den.coeffs, hi).inverse()
        s = logr.truncate(hi).log()
        return s + LSeries(0, self.P.coeffs, hi)

    def generality_flags(self):
        return {
            "R_zeros_simple": self.R_num.is_squarefree(),
            "R_poles_simple": self.R_den.is_squarefree(),
            "P_zeros_simple": self.P.is_zero() or self.P.is_squarefree(),
        }

    def to_payload(self):
        return {"P": self.P.to_strings(),
                "R_num": self.R_num.to_strings(),
                "R_den": self.R_den.to_strings()}


# ---------------------------------------------------------------------------
# curve data


@dataclass
class SpectralCurveSpec:
    y: RatFunc
    dlogX: RatFunc
    anchor: Optional[Rat(0).__class__] = None
    X_explicit: Optional[RatFunc] = None

    def __post_init__(self):
        if self.anchor is not None:
            a = Rat(self.anchor)
            self.anchor = a
            if self.y.has_pole_at(a):
                raise CurveError("y must be regular at the anchor")
            res = _simple_pole_residue(self.dlogX, a)
            if res is None or not (res == 1):
                raise CurveError("dlogX must have a simple pole with residue 1 "
                                 "at the anchor (X a simple zero there)")
        if self.X_explicit is not None:
            dlog = self.X_explicit.derivative() / self.X_explicit
            if not (dlog == self.dlogX):
                raise CurveError("X_explicit inconsistent with dlogX")

    def y_at_anchor(self):
        return self.y.eval(self.anchor)

    def shift_to_zero_y(self):
        """Return (curve', y0) with y'(O) = 0; callers shift psi by y0."""
        y0 = self.y_at_anchor()
        if not y0:
            return self, Rat(0)
        return SpectralCurveSpec(self.y - RatFunc.const(y0), self.dlogX,
                                 self.anchor, self.X_explicit), y0

    def curve_hash_payload(self):
        return {
            "y": self.y.to_payload(),
            "dlogX": self.dlogX.to_payload(),
            "anchor": None if self.anchor is None else str(self.anchor),
        }


def _simple_pole_residue(f: RatFunc, a):
    """Residue of f dz at a rational point a when the pole is simple, else None."""
    den = f.den
    va = den.eval(a)
    if va:
        return None
    dva = den.derivative().eval(a)
    if not dva:
        return None
    return f.num.eval(a) / dva


# ---------------------------------------------------------------------------
# ramification


@dataclass
class RamComponent:
    factor: Poly                 # monic squarefree; its roots are critical points
    vanishing_order: int         # local order of X: 0 for X regular, 2 for a double zero
    ring: QuotientRing = field(init=False)
    deck: Optional[LSeries] = None    # σ(ζ) over the quotient ring, once computed
    deck_cap: int = 0

    def __post_init__(self):
        self.ring = QuotientRing(self.factor)


@dataclass
class RamificationData:
    components: list
    crit_poly: Poly

    def degree(self):
        return self.crit_poly.degree()


def ramification_locus(curve: SpectralCurveSpec) -> RamificationData:
    """Locate the zeros of dX (the simple critical points of X).

    Zeros of dX away from the zero locus of X are the roots of the numerator
    of dlogX.  A double zero of X (a pole of dlogX with residue exactly 2) is
    also a simple zero of dX, so residues at the poles of dlogX are scanned
    for integer values >= 2.  Non-simple ramification anywhere is an error, as
    are critical points at infinity.
    """
    u = curve.dlogX.num
    v = curve.dlogX.den
    comps = []
    if u.is_zero():
        raise CurveError("dlogX vanishes identically")
    # regular-point critical locus
    if u.degree() >= 1:
        if not u.is_squarefree():
            raise CurveError("non-simple critical point (numerator of dlogX "
                             "has a repeated root)")
        comps.append(RamComponent(u.monic(), 0))
    # zeros of X of order k >= 2: integer residues of dlogX
    for k, fk in _integer_residue_loci(u, v):
        if k >= 3:
            raise CurveError("zero of X of order %d gives a non-simple "
                             "critical point" % k)
        if k == 2:
            if _multiplicity(v, fk) != 1 or v.exact_div(fk).gcd(fk).degree() > 0:
                raise CurveError("higher-order pole of dlogX at a residue-2 locus")
            comps.append(RamComponent(fk, 2))
    _check_infinity_not_critical(u, v)
    crit = Poly((Rat(1),))
    for c in comps:
        crit = crit * c.factor
    if not crit.is_squarefree():
        raise CurveError("overlapping ramification components")
    for c in comps:
        if curve.y.den.gcd(c.factor).degree() > 0:
            raise CurveError("y singular at a critical point")
        dy_num = curve.y.derivative().num
        if dy_num.gcd(c.factor).degree() > 0:
            raise CurveError("dy vanishes at a critical point")
        if curve.anchor is not None and not c.factor.eval(curve.anchor):
            raise CurveError("anchor coincides with a critical point")
    return RamificationData(comps, crit)


def _multiplicity(v: Poly, f: Poly) -> int:
    m = 0
    while True:
        q, r = v.divmod(f)
        if r.coeffs:
            return m
        v = q
        m += 1


def _integer_residue_loci(u: Poly, v: Poly):
    """Pairs (k, factor) where dlogX=u/v has integer residue k>=2 on factor|v."""
    if v.degree() < 1:
        return []
    vm = v.monic()
    dv = vm.derivative()
    # m(k) = prod over roots r of v of (u(r) - k v'(r)) is a polynomial in k
    pts = []
    for kk in range(vm.degree() + 1):
        w = u - dv.scale(Rat(kk))
        pts.append((Rat(kk), vm.resultant(w) if w.coeffs else Rat(0)))
    mk = _interpolate(pts)
    out = []
    if mk.is_zero():
        # impossible for a reduced fraction: u and v' cannot both vanish at a root of v
        raise CurveError("degenerate residue data for dlogX")
    for r in mk.rational_roots():
        if r.denominator == 1 and r >= 2:
            k = int(r)
            fk = vm.gcd(u - dv.scale(Rat(k)))
            if fk.degree() > 0:
                out.append((k, fk))
    return out


def _interpolate(points) -> Poly:
    """Lagrange interpolation through (x, y) pairs with rational x."""
    acc = Poly()
    for i, (xi, yi) in enumerate(points):
        if not yi:
            continue
        num = Poly((yi,))
        den = Rat(1)
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * (ZPOLY - xj)
            den = den * (xi - xj)
        acc = acc + num.scale(1 / den)
    return acc


def _check_infinity_not_critical(u: Poly, v: Poly):
    du, dv = u.degree(), v.degree()
    ord_form = dv - du - 2  # order of the 1-form dlogX at infinity
    if ord_form >= 1:
        raise CurveError("critical point at infinity (dX vanishes there)")
    if ord_form == -1:
        res_inf = -(u.lead() / v.lead())
        if res_inf.denominator == 1 and res_inf >= 2:
            raise CurveError("zero of X of order >= 2 at infinity")


# ---------------------------------------------------------------------------
# deck transformations


def deck_transformation(curve: SpectralCurveSpec, ram: RamificationData,
                        order_cap: int) -> RamificationData:
    """Solve X(σ(z)) = X(z) near each critical point for the branch σ'(t) = -1.

    σ is computed as a series in the local coordinate ζ = z - t over the
    quotient ring of each component, to ζ^order_cap inclusive.
    """
    if order_cap < 2:
        raise CurveError("deck series need order_cap >= 2")
    for comp in ram.components:
        if comp.deck is not None and comp.deck_cap >= order_cap:
            continue
        comp.deck = _solve_deck(curve, comp, order_cap)
        comp.deck_cap = order_cap
    return ram


def _solve_deck(curve: SpectralCurveSpec, comp: RamComponent, cap: int) -> LSeries:
    ring = comp.ring
    t = ring.gen
    k = comp.vanishing_order
    zero = ring.zero
    work = cap + 3
    d_local = curve.dlogX.local_series(t, work, invert=ring.inverse)
    if k:
        sing = LSeries(-1, (ring.elem(k),), work, zero)
        d_local = d_local - sing
        if d_local.order() is not None and d_local.order() < 0:
            raise CurveError("residue mismatch at a vanishing-order component")
    F = d_local.integrate().truncate(work)

    one = LSeries(0, (ring.one,), work, zero)
    zeta = LSeries(1, (ring.one,), work, zero)

    def phi(s: LSeries) -> LSeries:
        # s has positive order; σ = -ζ(1+s)
        sigma = (zeta * (one + s)) * Rat(-1)
        val = F.compose(sigma, ring.inverse) - F
        if k:
            val = val + (one + s).log(ring.inverse) * Rat(k)
        return val

    if k == 0:
        lam = F[2] * 2  # F = F2 ζ^2 + ..., linear response coefficient
        offset = 2
        lam_inv = ring.inverse(lam)
    else:
        lam_inv = ring.inverse(ring.elem(k))
        offset = 0
    s = LSeries(1, (), work, zero)
    for m in range(1, cap):
        r = phi(s)
        rm = r[m + offset] if r.known(m + offset) else zero
        if not rm:
            continue
        s = s + LSeries(m, (-(lam_inv * rm),), work, zero)
    sigma = ((zeta * (one + s)) * Rat(-1)).truncate(cap)
    # certify to the cap: X-invariance and involutivity
    resid = phi(s)
    for kk, c in resid.items():
        if c and kk <= cap + offset - 1:
            raise CurveError("deck equation unsolved at order %d" % kk)
    comp_check = sigma.compose(sigma, ring.inverse)
    for kk, c in comp_check.items():
        if kk == 1:
            if not (c == ring.one):
                raise CurveError("deck series fails involutivity")
        elif c and kk <= cap:
            raise CurveError("deck series fails involutivity at order %d" % kk)
    return sigma


# ---------------------------------------------------------------------------
# duality on curves


def dual_curve(curve: SpectralCurveSpec, psi: PsiSpec) -> SpectralCurveSpec:
    """The curve (w, y) with dlog w = dlog X - psi'(y) y' and the same anchor."""
    yz = curve.y
    # psi'(y(z)) * y'(z) as a rational function of z
    pp = psi.psi_prime()
    comp_num = _compose_ratfunc(pp, yz)
    dlogw = curve.dlogX - comp_num * yz.derivative()
    if curve.anchor is not None:
        y0 = yz.eval(curve.anchor)
        if not psi.R_den.eval(y0) or not psi.R_num.eval(y0):
            raise CurveError("psi(y) singular at the anchor")
    return SpectralCurveSpec(yz, dlogw, curve.anchor, None)


def _compose_ratfunc(f: RatFunc, g: RatFunc) -> RatFunc:
    """f(g(z)) for rational f, g."""
    n = max(f.num.degree(), f.den.degree(), 0)
    num = Poly()
    den = Poly()
    gn, gd = g.num, g.den
    for k, c in enumerate(f.num.coeffs):
        num = num + (gn ** k) * (gd ** (n - k)).scale(c)
    for k, c in enumerate(f.den.coeffs):
        den = den + (gn ** k) * (gd ** (n - k)).scale(c)
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# conditions of the duality theorem


@dataclass
class ConditionReport:
    checks: dict
    notes: dict

    def passed(self, keys=None) -> bool:
        keys = keys if keys is not None else list(self.checks)
        return all(self.checks[k] for k in keys)


def validate_conditions(curve: SpectralCurveSpec, psi: PsiSpec) -> ConditionReport:
    """Check the duality hypotheses; failures are report entries, not errors."""
    checks = {}
    notes = {}
    checks["meromorphy"] = True
    notes["meromorphy"] = "dlogX and y rational by construction"

    flags = psi.generality_flags()
    checks.update(flags)

    dual_ok = True
    disjoint = True
    dw_simple = True
    try:
        dual = dual_curve(curve, psi)
        ram_w = ramification_locus(dual)
        critw = ram_w.crit_poly
    except CurveError as exc:
        dual_ok = False
        dw_simple = False
        critw = None
        notes["dual_curve"] = str(exc)
    if critw is not None:
        try:
            ram_x = ramification_locus(curve)
            disjoint = ram_x.crit_poly.gcd(critw).degree() == 0
            notes["crit_X"] = str(ram_x.crit_poly)
            notes["crit_w"] = str(critw)
        except CurveError as exc:
            disjoint = False
            notes["crit_X"] = str(exc)
    checks["dw_zeros_simple"] = dual_ok and dw_simple
    checks["dX_dw_zeros_disjoint"] = disjoint
    checks["R_locus_disjoint"] = _r_locus_disjoint(curve, psi, notes)

    anchor_ok = curve.anchor is not None
    checks["anchor"] = anchor_ok
    if anchor_ok:
        notes["anchor"] = "X has a simple zero at %s" % curve.anchor

    checks["y_pole_condition"] = _y_pole_condition(curve, notes)
    return ConditionReport(checks, notes)


def _r_locus_disjoint(curve: SpectralCurveSpec, psi: PsiSpec, notes) -> bool:
    """Zeros and poles of R(y(z)) must avoid the poles of X on the curve.

    The pole-cancellation behind the duality needs the singular locus of
    ψ(y) away from where X blows up; a collision breaks the full recursion
    statement even though the series identities survive.
    """
    if psi.R_num.degree() < 1 and psi.R_den.degree() < 1:
        return True
    locus = Poly((Rat(1),))
    for rp in (psi.R_num, psi.R_den):
        if rp.degree() >= 1:
            comp = _compose_poly_ratfunc(rp, curve.y)
            if comp.degree() >= 1:
                locus = locus * comp.squarefree_part()
    # poles of X among the poles of dlogX: negative integer residues
    v = curve.dlogX.den
    u = curve.dlogX.num
    bad = Poly((Rat(1),))
    if v.degree() >= 1:
        neg = u.scale(Rat(-1))
        for k, fk in _integer_residue_loci(neg, v):
            bad = bad * fk  # residue -k: pole of X of order k
    ok = locus.gcd(bad).degree() == 0
    if not ok:
        notes["R_locus"] = "zeros/poles of R(y) meet poles of X on %r" % locus.gcd(bad)
    return ok


def _compose_poly_ratfunc(p: Poly, g: RatFunc) -> Poly:
    """Numerator of p(g(z)) (denominator is a power of den(g))."""
    n = p.degree()
    acc = Poly()
    for k, c in enumerate(p.coeffs):
        acc = acc + (g.num ** k) * (g.den ** (n - k)).scale(c)
    return acc


def _y_pole_condition(curve: SpectralCurveSpec, notes) -> bool:
    """At each pole of y: X finite and unramified, or dlogX with a simple pole."""
    ok = True
    witness = []
    u, v = curve.dlogX.num, curve.dlogX.den
    yden = curve.y.den
    if yden.degree() >= 1:
        for factor in _squarefree_factors(yden):
            f1 = v.gcd(factor)          # poles of dlogX among the poles of y
            if f1.degree() > 0:
                if v.exact_div(f1 ** _multiplicity(v, f1)).gcd(f1).degree() > 0 \
                        or _multiplicity(v, f1) > 1:
                    ok = False
                    witness.append("higher-order pole of dlogX on %r" % f1)
            f2 = factor.exact_div(f1) if f1.degree() else factor
            if f2.degree() > 0 and u.gcd(f2).degree() > 0:
                # dX vanishes at a pole of y where X is finite: ramified
                ok = False
                witness.append("X ramified at a pole of y on %r" % f2)
    if curve.y.num.degree() > curve.y.den.degree():
        du, dv = u.degree(), v.degree()
        ord_form = dv - du - 2
        if ord_form == -1:
            pass  # simple pole of dlogX at infinity
        elif ord_form == 0:
            pass  # X finite, dX nonzero at infinity
        else:
            ok = False
            witness.append("pole of y at infinity where dlogX form has order %d"
                           % ord_form)
    notes["y_poles"] = "; ".join(witness) if witness else "all poles admissible"
    return ok


def _squarefree_factors(p: Poly):
    """Squarefree factors of p (no multiplicity structure needed here)."""
    out = []
    q = p.squarefree_part()
    if q.degree() >= 1:
        out.append(q)
    return out
