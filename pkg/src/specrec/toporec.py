"""Correlator computation by the residue recursion on a genus-zero curve.

Entries W(g, m) are the m-point functions (differentials divided by the
product of dX_i/X_i measures); the base data are W(0,1) = y and the standard
bidifferential.  Residues at the critical points run in local coordinates
over the quotient ring of each ramification component and are resolved back
to global rational functions by traces, so irrational ramification never
leaves exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curve import RamComponent, RamificationData, SpectralCurveSpec, _solve_deck
from .poly import Poly
from .quotient import NeedSplit, QuotientRing
from .rationals import Rat
from .ratfunc import RatFunc
from .series import LSeries
from .tensorsum import MRat


class ToporecError(ValueError):
    pass


def euler_level(g: int, m: int) -> int:
    return 2 * g - 2 + m


def stable_pairs(chi_max: int):
    out = []
    for chi in range(1, chi_max + 1):
        for g in range(0, (chi + 2) // 2 + 1):
            m = chi + 2 - 2 * g
            if m >= 1 and (g, m) != (0, 1) and (g, m) != (0, 2):
                out.append((g, m))
    return out


@dataclass
class CorrelatorTable:
    curve: SpectralCurveSpec
    ram: RamificationData
    chi_max: int
    entries: dict = field(default_factory=dict)   # (g, m) -> MRat, stable only

    def w(self, g: int, m: int) -> MRat:
        if (g, m) == (0, 1):
            return MRat.from_factors(Rat(1), [self.curve.y])
        if (g, m) == (0, 2):
            raise ToporecError("the two-point function is not separable; "
                               "use the dedicated pairing helpers")
        return self.entries[(g, m)]

    def available(self, g, m):
        return (g, m) in self.entries or (g, m) == (0, 1)


# ---------------------------------------------------------------------------
# local expansion bookkeeping per ramification component


class LocalFrame:
    """Expansion data around one ramification component, window-capped."""

    def __init__(self, curve: SpectralCurveSpec, comp: RamComponent, win: int):
        if comp.deck is None or comp.deck_cap < win:
            comp.deck = _solve_deck(curve, comp, win)
            comp.deck_cap = win
        self.comp = comp
        self.ring = comp.ring
        self.win = win
        self.t = self.ring.gen
        self.zero = self.ring.zero
        self.sigma = comp.deck.truncate(win)
        self.curve = curve
        self._direct = {}
        self._pulled = {}
        self._sigma_pows = {}
        self.d_loc = self.expand(curve.dlogX)
        dy = self.expand(curve.y).compose(self.sigma, self.ring.inverse) - self.expand(curve.y)
        if dy.order() != 1:
            raise ToporecError("deck difference of y must vanish to first order only")
        self.kernel_c = self.d_loc * dy.inverse(self.ring.inverse)
        self.q_res = self.ring.divided_modulus()  # (p(x)-p(t))/(x-t) coefficients
        self._q_pows = {1: self.q_res}
        self._inv_d = None

    def expand(self, f: RatFunc) -> LSeries:
        got = self._direct.get(f)
        if got is None:
            got = f.local_series(self.t, self.win, invert=self.ring.inverse)
            self._direct[f] = got
        return got

    def expand_sigma(self, f: RatFunc) -> LSeries:
        got = self._pulled.get(f)
        if got is None:
            got = self.expand(f).compose(self.sigma, self.ring.inverse)
            self._pulled[f] = got
        return got

    def inv_d(self) -> LSeries:
        if self._inv_d is None:
            self._inv_d = self.d_loc.inverse(self.ring.inverse)
        return self._inv_d

    def sigma_pow(self, j: int) -> LSeries:
        got = self._sigma_pows.get(j)
        if got is None:
            got = self.sigma ** j
            self._sigma_pows[j] = got
        return got

    def qk_power(self, a: int):
        """Coefficients in the outer variable of ((p(x)-p(t))/(x-t))^a mod p(t)."""
        got = self._q_pows.get(a)
        if got is None:
            prev = self.qk_power(a - 1)
            base = self.q_res
            out = [self.zero] * (len(prev) + len(base) - 1)
            for i, ci in enumerate(prev):
                if not ci:
                    continue
                for j, cj in enumerate(base):
                    if cj:
                        out[i + j] = out[i + j] + ci * cj
            got = out
            self._q_pows[a] = got
        return got


# ---------------------------------------------------------------------------
# assembling the recursion bracket


def _pair_b_local(frame: LocalFrame) -> LSeries:
    """W(0,2)(z, σ(z)) expanded locally: 1/(D(ζ) D(σ) (ζ-σ)^2)."""
    ring = frame.ring
    d1 = frame.d_loc
    d2 = d1.compose(frame.sigma, ring.inverse)
    diff = LSeries(1, (ring.one,), frame.win, ring.zero) - frame.sigma
    return (d1 * d2 * diff * diff).inverse(ring.inverse)


def _pair_b_spectator(frame: LocalFrame, use_sigma: bool, k_cap: int):
    """W(0,2)(active, z_i) locally: Σ_k (k+1)·base^k/D(ζ') ⊗ (z_i-t)^(-k-2)/D(z_i).

    Yields (local series, coupling power) pairs; the spectator keeps the
    rational factor 1/D and a coupling power resolved later by traces.
    """
    inv_d = frame.inv_d()
    if use_sigma:
        inv_d = inv_d.compose(frame.sigma, frame.ring.inverse)
    out = []
    for k in range(0, k_cap + 1):
        base = frame.sigma_pow(k) if use_sigma else LSeries(k, (frame.ring.one,), frame.win,
                                                            frame.ring.zero)
        out.append((base * inv_d * Rat(k + 1), k + 2))
    return out


def _eval_entry_local(table, frame: LocalFrame, g: int, args, spect_ids, k_cap: int):
    """Local pieces of W(g, 1+|spect_ids|)(active, spectators).

    args is "z" or "sigma" for the active slot.  Yields tuples
    (coeff, local_series, key) with key a dict spectator_id -> (RatFunc|None,
    coupling_power).
    """
    m = 1 + len(spect_ids)
    use_sigma = args == "sigma"
    if (g, m) == (0, 1):
        s = frame.expand_sigma(table.curve.y) if use_sigma else frame.expand(table.curve.y)
        yield (Rat(1), s, {})
        return
    if (g, m) == (0, 2):
        zi = spect_ids[0]
        inv_d_rat = RatFunc(table.curve.dlogX.den, table.curve.dlogX.num)
        for s, cpow in _pair_b_spectator(frame, use_sigma, k_cap):
            yield (Rat(1), s, {zi: (inv_d_rat, cpow)})
        return
    entry = table.w(g, m)
    for key, coeff in entry.terms.items():
        f0 = key[0]
        if f0 is None:
            s = LSeries(0, (frame.ring.one,), frame.win, frame.ring.zero)
        else:
            s = frame.expand_sigma(f0) if use_sigma else frame.expand(f0)
        spec = {}
        for slot, zi in enumerate(spect_ids, start=1):
            spec[zi] = (key[slot], 0)
        yield (coeff, s, spec)


def _merge_keys(k1: dict, k2: dict) -> dict:
    out = dict(k1)
    for zi, (f, c) in k2.items():
        if zi in out:
            f0, c0 = out[zi]
            f = f0 if f is None else (f if f0 is None else f0 * f)
            out[zi] = (f, c0 + c)
        else:
            out[zi] = (f, c)
    return out


def _splits(items):
    n = len(items)
    for mask in range(1 << n):
        left = tuple(items[i] for i in range(n) if mask >> i & 1)
        right = tuple(items[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def _compute_entry_component(table: CorrelatorTable, frame: LocalFrame,
                             g: int, m: int) -> MRat:
    """Residue contribution of one ramification component to W(g, m)."""
    ring = frame.ring
    win = frame.win
    spectators = list(range(1, m))
    k_cap = win
    pieces = []
    # bracket part with the lowered genus
    if g >= 1:
        if (g - 1, m + 1) == (0, 2):
            pieces.append((Rat(1), _pair_b_local(frame), {}))
        else:
            for coeff, s_loc, key in _eval_entry_active_pair(table, frame, g - 1,
                                                             spectators, k_cap):
                pieces.append((coeff, s_loc, key))
    # bracket part with stable splittings
    for left, right in _splits(spectators):
        for g1 in range(0, g + 1):
            g2 = g - g1
            if (g1, len(left)) == (0, 0) or (g2, len(right)) == (0, 0):
                continue
            if not _entry_usable(table, g1, 1 + len(left)) or \
               not _entry_usable(table, g2, 1 + len(right)):
                raise ToporecError("missing table entry for the recursion")
            for c1, s1, k1 in _eval_entry_local(table, frame, g1, "z", left, k_cap):
                for c2, s2, k2 in _eval_entry_local(table, frame, g2, "sigma", right, k_cap):
                    pieces.append((c1 * c2, s1 * s2, _merge_keys(k1, k2)))
    out = MRat.zero(m)
    inv_d_rat = RatFunc(table.curve.dlogX.den, table.curve.dlogX.num)
    for coeff, s_loc, key in pieces:
        b = frame.kernel_c * s_loc
        ordb = b.order()
        if ordb is None:
            continue
        for j in range(1, max(0, -ordb) + 1):
            factor = frame.sigma_pow(j) - LSeries(j, (ring.one,), win, ring.zero)
            cj = (factor * b)[-1]
            if not cj:
                continue
            _finalize_term(out, table, frame, coeff * Rat(1, 2), cj, j + 1, key,
                           inv_d_rat, m)
    return out


def _eval_entry_active_pair(table, frame: LocalFrame, g: int, spect_ids, k_cap):
    """W(g, 2+|spect|)(z, σ(z), spectators) expanded locally."""
    m = 2 + len(spect_ids)
    entry = table.w(g, m)
    for key, coeff in entry.terms.items():
        f0, f1 = key[0], key[1]
        s0 = LSeries(0, (frame.ring.one,), frame.win, frame.ring.zero) if f0 is None \
            else frame.expand(f0)
        s1 = LSeries(0, (frame.ring.one,), frame.win, frame.ring.zero) if f1 is None \
            else frame.expand_sigma(f1)
        spec = {}
        for slot, zi in enumerate(spect_ids, start=2):
            spec[zi] = (key[slot], 0)
        yield (coeff, s0 * s1, spec)


def _entry_usable(table, g, m):
    return (g, m) in ((0, 1), (0, 2)) or table.available(g, m)


def _finalize_term(out: MRat, table, frame: LocalFrame, coeff, qr_c, active_pow,
                   key, inv_d_rat, m):
    """Resolve quotient-ring data into global rational factors by traces."""
    ring = frame.ring
    p = ring.modulus
    coupled = [(0, active_pow)] + [(zi, c) for zi, (f, c) in key.items() if c]
    # expand each coupled slot's kernel power into (degree, ring element) terms
    combos = [((), qr_c)]
    for pos, power in coupled:
        qpow = frame.qk_power(power)
        new = []
        for degs, val in combos:
            for d, cd in enumerate(qpow):
                if not cd:
                    continue
                prod = val * cd
                if prod:
                    new.append((degs + ((pos, d),), prod))
        combos = new
    pden = {pos: RatFunc(Poly((Rat(1),)), p ** power) for pos, power in coupled}
    for degs, val in combos:
        tr = ring.trace(val)
        if not tr:
            continue
        factors = [None] * m
        factors[0] = inv_d_rat
        for zi, (f, c) in key.items():
            factors[zi] = f
        for pos, d in degs:
            mono = RatFunc(Poly((Rat(0),) * d + (Rat(1),))) if d else None
            extra = pden[pos] if pos in pden else None
            cur = factors[pos]
            for piece in (mono, extra):
                if piece is None:
                    continue
                cur = piece if cur is None else cur * piece
            factors[pos] = cur
        # coupled slots with degree 0 still need their denominator power
        seen = {pos for pos, _ in degs}
        for pos, power in coupled:
            if pos not in seen:
                cur = factors[pos]
                factors[pos] = pden[pos] if cur is None else cur * pden[pos]
        out.add_term(coeff * tr, factors)


def _window(g: int, m: int) -> int:
    return 2 * (2 * g - 2 + m + 2) + 6


def compute_entry(table: CorrelatorTable, g: int, m: int) -> MRat:
    result = MRat.zero(m)
    stack = list(table.ram.components)
    while stack:
        comp = stack.pop()
        try:
            frame = LocalFrame(table.curve, comp, _window(g, m))
            result = result + _compute_entry_component(table, frame, g, m)
        except NeedSplit as exc:
            f1 = exc.factor
            f2 = comp.factor.exact_div(f1)
            if f2.degree() < 1 or f1.degree() < 1:
                raise ToporecError("component split failed") from exc
            stack.append(RamComponent(f1, comp.vanishing_order))
            stack.append(RamComponent(f2, comp.vanishing_order))
    return result


def tr_correlators(curve: SpectralCurveSpec, ram: RamificationData,
                   chi_max: int) -> CorrelatorTable:
    """All stable W(g, m) with 2g-2+m <= chi_max, as global rational data."""
    table = CorrelatorTable(curve, ram, chi_max)
    for g, m in stable_pairs(chi_max):
        table.entries[(g, m)] = compute_entry(table, g, m)
    return table


# ---------------------------------------------------------------------------
# the regularized two-point diagonal


def pair_b_reg_diagonal_local(frame: LocalFrame) -> LSeries:
    """lim_{z'->z} [W(0,2)(z,z') - XX'/(X-X')^2] expanded at a component.

    Uses X(z)/X(z') = exp(Φ(z)-Φ(z')) with Φ' = dlogX, so only dlogX enters.
    The answer is the ε^0 term of 1/(D(z)D(z+ε)ε²) - 1/(δ² S(δ)²) where
    δ = Φ(z) - Φ(z+ε).
    """
    ring = frame.ring
    win = frame.win
    zero_c = LSeries(0, (), win, frame.zero)   # zero of the coefficient ring
    ecap = 4
    d_derivs = [frame.d_loc]
    for _ in range(ecap + 1):
        d_derivs.append(d_derivs[-1].derivative())
    # D(z+ε) and δ(ε) as ε-series with series coefficients
    fact = 1
    d_shift_coeffs = []
    delta_coeffs = [zero_c]
    for j in range(ecap + 1):
        if j:
            fact *= j
        d_shift_coeffs.append(d_derivs[j] * Rat(1, fact))
    fact = 1
    for j in range(1, ecap + 2):
        fact *= j
        delta_coeffs.append(d_derivs[j - 1] * Rat(-1, fact))
    d_shift = LSeries(0, d_shift_coeffs, ecap, zero_c)
    delta = LSeries(1, delta_coeffs[1:], ecap + 1, zero_c)

    def cinv(series_coeff):
        return series_coeff.inverse(ring.inverse)

    a_part = (LSeries(0, (frame.d_loc,), ecap, zero_c) * d_shift).inverse(cinv).shift(-2)
    # 1/(δ S(δ))² where δ S(δ) = 2 sinh(δ/2) = Σ δ^(2j+1)/(4^j (2j+1)!)
    from .sfuncs import sinhc_coeff
    sinh_coeffs = []
    for k in range(ecap + 2):
        if k % 2 == 1:
            sinh_coeffs.append(LSeries(0, (ring.one * sinhc_coeff((k - 1) // 2),),
                                       win, frame.zero))
        else:
            sinh_coeffs.append(zero_c)
    sinh_ser = LSeries(1, sinh_coeffs[1:], ecap + 1, zero_c)
    dsinh = sinh_ser.compose(delta, cinv)
    b_part = (dsinh * dsinh).inverse(cinv)
    total = a_part - b_part
    for k, c in total.items():
        if k < 0 and c:
            raise ToporecError("regularized diagonal retains a pole in ε")
    return total[0]


# ---------------------------------------------------------------------------
# definition checkers: loop equations, projection, residues


@dataclass
class CheckReport:
    name: str
    status: str           # "pass" | "fail" | "inconclusive"
    details: list

    @property
    def ok(self):
        return self.status == "pass"


def _rand_points(rng, count, avoid):
    pts = []
    while len(pts) < count:
        cand = Rat(rng.randint(2, 40), rng.randint(1, 7))
        if all(poly.eval(cand) for poly in avoid) and cand not in pts:
            pts.append(cand)
    return pts


def _specialized(entry: MRat, points) -> RatFunc:
    """Slot 0 kept symbolic; remaining slots evaluated at the given points."""
    acc = RatFunc(Poly(()))
    for key, coeff in entry.terms.items():
        v = coeff
        for f, x in zip(key[1:], points):
            if f is not None:
                v = v * f.eval(x)
        if not v:
            continue
        f0 = key[0]
        acc = acc + (RatFunc(Poly((v,))) if f0 is None else f0 * v)
    return acc


def _polar_vanishes(frame: LocalFrame, local: LSeries) -> bool:
    shifted = local.compose(frame.sigma, frame.ring.inverse)
    total = local + shifted
    for k, c in total.items():
        if k < 0 and c:
            return False
    return True


def check_linear_loop(table: CorrelatorTable, ram: RamificationData,
                      seed: int = 11, samples: int = 3) -> CheckReport:
    """W(g, m+1)(z, ...) + W(g, m+1)(σ(z), ...) holomorphic at each component."""
    import random
    rng = random.Random(seed)
    details = []
    ok = True
    avoid = [table.ram.crit_poly, table.curve.dlogX.den, table.curve.dlogX.num]
    cases = [(0, 2)] + sorted(table.entries)
    for g, m in cases:
        for comp in ram.components:
            frame = LocalFrame(table.curve, comp, _window(g, m) + 2)
            for _ in range(samples):
                pts = _rand_points(rng, m - 1, avoid)
                if (g, m) == (0, 2):
                    f = _pair_b_spec_rational(table.curve, pts[0])
                else:
                    f = _specialized(table.entries[(g, m)], pts)
                loc = f.local_series(frame.t, frame.win, invert=frame.ring.inverse)
                good = _polar_vanishes(frame, loc)
                ok = ok and good
                details.append(("W(%d,%d) at %r spect %s" % (g, m, comp.factor, pts),
                                "pass" if good else "fail"))
    return CheckReport("linear-loop", "pass" if ok else "fail", details)


def _pair_b_spec_rational(curve: SpectralCurveSpec, z2) -> RatFunc:
    """W(0,2)(z, z2) for a rational spectator point z2."""
    inv_d = RatFunc(curve.dlogX.den, curve.dlogX.num)
    dz2 = curve.dlogX.eval(z2)
    zpoly = Poly((-z2, Rat(1)))
    return inv_d * RatFunc(Poly((Rat(1),)), zpoly * zpoly) * (1 / dz2)


def check_quadratic_loop(table: CorrelatorTable, ram: RamificationData,
                         seed: int = 13, samples: int = 3) -> CheckReport:
    """The squared combination has odd polar part at each component."""
    import random
    rng = random.Random(seed)
    details = []
    ok = True
    avoid = [table.ram.crit_poly, table.curve.dlogX.den, table.curve.dlogX.num]
    cases = []
    for g in range(0, table.chi_max + 1):
        for m in range(0, table.chi_max + 1):
            if 2 * g - 2 + (m + 1) < 1 or 2 * g - 2 + (m + 1) > table.chi_max:
                continue
            if g == 0 and m == 0:
                continue
            cases.append((g, m))
    for g, m in cases:
        for comp in ram.components:
            frame = LocalFrame(table.curve, comp, _window(g, m + 2) + 4)
            for _ in range(samples):
                pts = _rand_points(rng, m, avoid)
                loc = _qloop_local(table, frame, g, m, pts)
                good = _polar_vanishes(frame, loc)
                ok = ok and good
                details.append(("Q(%d,%d) at %r spect %s" % (g, m, comp.factor, pts),
                                "pass" if good else "fail"))
    return CheckReport("quadratic-loop", "pass" if ok else "fail", details)


def _qloop_local(table, frame: LocalFrame, g: int, m: int, pts) -> LSeries:
    """Local expansion of W(g-1, m+2)(z, z, ...) + Σ W W at a component."""
    ring = frame.ring

    def local_of(gg, mm, subset):
        if (gg, mm) == (0, 1):
            return frame.expand(table.curve.y)
        if (gg, mm) == (0, 2):
            return frame.expand(_pair_b_spec_rational(table.curve, subset[0]))
        f = _specialized(table.entries[(gg, mm)], subset)
        return frame.expand(f)

    total = LSeries(0, (), frame.win, ring.zero)
    if g >= 1:
        if (g - 1, m + 2) == (0, 2):
            total = total + pair_b_reg_diagonal_local(frame)
        else:
            entry = table.entries[(g - 1, m + 2)]
            for key, coeff in entry.terms.items():
                s0 = LSeries(0, (ring.one,), frame.win, ring.zero) if key[0] is None \
                    else frame.expand(key[0])
                s1 = LSeries(0, (ring.one,), frame.win, ring.zero) if key[1] is None \
                    else frame.expand(key[1])
                v = coeff
                for f, x in zip(key[2:], pts):
                    if f is not None:
                        v = v * f.eval(x)
                if v:
                    total = total + (s0 * s1) * v
    idx = list(range(m))
    for mask in range(1 << m):
        left = [pts[i] for i in idx if mask >> i & 1]
        right = [pts[i] for i in idx if not mask >> i & 1]
        for g1 in range(0, g + 1):
            g2 = g - g1
            m1, m2 = 1 + len(left), 1 + len(right)
            if euler_level(g1, m1) > table.chi_max or euler_level(g2, m2) > table.chi_max:
                raise ToporecError("quadratic loop check exceeds the table")
            s1 = local_of(g1, m1, left)
            s2 = local_of(g2, m2, right)
            total = total + s1 * s2
    return total


def check_projection(table: CorrelatorTable, seed: int = 17, samples: int = 3) -> CheckReport:
    """Stable differentials have poles only at the critical points.

    Specializes spectators at seeded rational points, multiplies back the
    dlogX measure in the active slot, and verifies every denominator factor
    divides the critical polynomial (plus regularity at infinity).
    """
    import random
    rng = random.Random(seed)
    details = []
    ok = True
    crit = table.ram.crit_poly
    avoid = [crit, table.curve.dlogX.den, table.curve.dlogX.num]
    for (g, m), entry in sorted(table.entries.items()):
        for _ in range(samples):
            pts = _rand_points(rng, m - 1, avoid)
            f = _specialized(entry, pts) * table.curve.dlogX
            den = f.den
            while True:
                gg = den.gcd(crit)
                if gg.degree() < 1:
                    break
                den = den.exact_div(gg)
            good = den.degree() == 0
            # no pole at infinity for the 1-form f dz
            if f.num.coeffs and f.den.degree() - f.num.degree() < 2:
                good = False
            ok = ok and good
            details.append(("omega(%d,%d) spect %s" % (g, m, pts),
                            "pass" if good else "fail"))
    return CheckReport("projection", "pass" if ok else "fail", details)


def check_crit_residues(table: CorrelatorTable, seed: int = 23) -> CheckReport:
    """Residues of the stable differentials vanish at every critical point."""
    import random
    rng = random.Random(seed)
    details = []
    ok = True
    avoid = [table.ram.crit_poly, table.curve.dlogX.den, table.curve.dlogX.num]
    for (g, m), entry in sorted(table.entries.items()):
        pts = _rand_points(rng, m - 1, avoid)
        f = _specialized(entry, pts) * table.curve.dlogX
        for comp in table.ram.components:
            frame = LocalFrame(table.curve, comp, _window(g, m))
            loc = f.local_series(frame.t, frame.win, invert=frame.ring.inverse)
            res = loc[-1]
            good = not res
            ok = ok and good
            details.append(("res omega(%d,%d) at %r" % (g, m, comp.factor),
                            "pass" if good else "fail"))
    return CheckReport("critical-residues", "pass" if ok else "fail", details)


def check_symmetry(table: CorrelatorTable, seed: int = 29, samples: int = 2) -> CheckReport:
    """Spot-check permutation symmetry on random rational points."""
    import random
    rng = random.Random(seed)
    details = []
    ok = True
    avoid = [table.ram.crit_poly, table.curve.dlogX.den, table.curve.dlogX.num]
    for (g, m), entry in sorted(table.entries.items()):
        if m < 2:
            continue
        for _ in range(samples):
            pts = _rand_points(rng, m, avoid)
            v1 = entry.eval_all(pts)
            rot = pts[1:] + pts[:1]
            v2 = entry.eval_all(rot)
            swap = list(pts)
            swap[0], swap[1] = swap[1], swap[0]
            v3 = entry.eval_all(swap)
            good = v1 == v2 == v3
            ok = ok and good
            details.append(("W(%d,%d) symmetry at %s" % (g, m, pts),
                            "pass" if good else "fail"))
    return CheckReport("symmetry", "pass" if ok else "fail", details)
