"""The closed-form duality transform: n-point functions of the dual curve as
a weighted sum over connected multiedge graphs acting on the original
correlator expansions.

Everything is series-level at the anchor: the input table supplies anchor
expansions W(g,m) as sums of outer products of univariate series in the X
coordinates, the engine applies per-vertex operator chains (the u/v/θ
auxiliary extractions with the sinh-kernel dressings) and per-multiedge
dressed table insertions, and returns series in the dual coordinates
w_1..w_n.  ħ-grading is exact: the target coefficient [ħ^{2g}] assembles from
per-vertex slices, the graph Betti weight and the table's own genus powers.
"""

from __future__ import annotations

from .curve import PsiSpec
from .graphs import enumerate_graphs
from .mseries import MSeries
from .rationals import Rat
from .series import LSeries
from .sfuncs import sinhc_coeff, sinhc_series, theta_derivative
from .tensorsum import SepSeries


class DualityError(ValueError):
    pass


class SeriesTable:
    """Anchor-expansion data feeding the transform.

    entries: (g, m) -> list of (coeff, tuple of LSeries factors); the (0,2)
    entry holds only the regular correction part (the singular kernel is
    handled by the engine).  one_point(g) returns the series W(g,1).
    """

    def __init__(self, entries: dict, chi_max: int):
        self.entries = {k: list(v) for k, v in entries.items()}
        self.chi_max = chi_max

    @staticmethod
    def from_sepseries(table: dict, chi_max: int) -> "SeriesTable":
        entries = {}
        for (g, m), sep in table.items():
            entries[(g, m)] = [(c, k) for k, c in sep.terms.items()]
        return SeriesTable(entries, chi_max)

    def has(self, g, m):
        return (g, m) in self.entries

    def terms(self, g, m):
        return self.entries.get((g, m), [])

    def one_point(self, g) -> LSeries:
        acc = None
        for c, key in self.terms(g, 1):
            f = key[0]
            s = (f if f is not None else LSeries(0, (Rat(1),), None)) * c
            acc = s if acc is None else acc + s
        return acc


class DualityEngine:
    def __init__(self, table: SeriesTable, psi: PsiSpec, g_max: int, n_max: int,
                 order: int, margins=None):
        self.table = table
        self.psi = psi
        self.g_max = g_max
        self.n_max = n_max
        self.K = order
        m = margins or {}
        self.r_margin = m.get("r", 1)
        self.k_margin = m.get("k", 1)
        self.u_margin = m.get("u", 1)
        self.sing_cap = order + m.get("sing", 2)
        self.h_hi = 2 * g_max
        self.leg_max = g_max + n_max + 1
        self.r_max = self.leg_max + 2 * g_max + 1 + self.r_margin
        self.k_max = self.r_max + g_max + 1 + self.k_margin
        self.u_hi = self.r_max + 2 + self.u_margin
        self.x_lo = -self.sing_cap - 2
        self.th_cap = order + 2
        y = table.one_point(0)
        if y is None or y.order() != 1:
            raise DualityError("the (0,1) entry must vanish to first order")
        self.y_x = y.truncate(self.K + 1)
        self._build_frames()
        self._build_kernels()
        self._images = {}
        self._leg_cache = {}
        self._sinhc_k = {}

    # -- coordinate data ----------------------------------------------------------

    def _build_frames(self):
        K = self.K
        psi_series = self.psi.psi_theta_series(self.th_cap)
        psi_at_y = psi_series.compose(self.y_x).truncate(K + 1)
        self.w_of_x = (LSeries(1, (Rat(1),), K + 1) * (-psi_at_y).exp()).truncate(K + 1)
        self.x_of_w = self.w_of_x.reversion()
        # dlogX/dlogw = 1/(1 - X d/dX psi(Y(X)))
        xd = psi_at_y.derivative().shift(1)  # X * d/dX
        jac_inv = LSeries(0, (Rat(1),), K + 1) - xd
        self.jac = jac_inv.inverse().truncate(K + 1)
        self.jac_ms = MSeries.from_lseries(self.jac, "X")
        self.x_of_w_ms = MSeries.from_lseries(self.x_of_w, "w")

    def _build_kernels(self):
        """A(θ,v,ħ), the exponent of the v-dressing, and the conjugated kernels."""
        th_cap, h_hi, k_max = self.th_cap, self.h_hi, self.k_max
        psi_series = self.psi.psi_theta_series(th_cap + 2 * max(1, h_hi))
        logr = psi_series - LSeries(0, self.psi.P.coeffs, th_cap + 2 * max(1, h_hi))
        # tau(ζ; v) = S(vζ)/S(ζ) - 1 as a series in ζ², v
        zv = MSeries.monomial(Rat(1), ("zeta", "v"), (1, 1),
                              windows=((0, h_hi), (0, k_max)))
        z1 = MSeries.monomial(Rat(1), ("zeta",), (1,), windows=((0, h_hi),))
        s_vz = _sinhc_ms(zv, h_hi)
        s_z = _sinhc_ms(z1, h_hi)
        tau = s_vz * s_z.unit_inverse() - 1
        a = MSeries.zero(("th", "v", "h"),
                         ((0, th_cap), (0, k_max), (0, h_hi)))
        for j in range(1, h_hi // 2 + 1):
            # coefficient of ζ^(2j) in S(vζ) and in tau
            sv = MSeries(("v",), ((0, k_max),),
                         {(2 * j,): sinhc_coeff(j)})
            tau_j = tau.extract("zeta", 2 * j) if h_hi >= 2 * j else None
            p_der = self.psi.P.derivative(2 * j)
            p_ms = MSeries(("th",), ((0, th_cap),),
                           {(k,): c for k, c in enumerate(p_der.coeffs) if c})
            logr_der = logr
            for _ in range(2 * j):
                logr_der = logr_der.derivative()
            r_ms = MSeries.from_lseries(logr_der.truncate(th_cap), "th")
            h2j = MSeries.monomial(Rat(1), ("h",), (2 * j,), windows=((0, h_hi),))
            term = (p_ms * sv + (r_ms * tau_j if tau_j is not None else
                                 MSeries.zero(("th",), ((0, th_cap),)))) * h2j
            a = a + term
        v1 = MSeries.monomial(Rat(1), ("v",), (1,), windows=((0, self.k_max + 1),))
        self.l0 = (a * v1).exp("v") if a.terms else MSeries.const(
            Rat(1), ("th", "v", "h"), ((0, th_cap), (0, k_max + 1), (0, h_hi)))
        psi_prime = self.psi.psi_prime()
        pp_num = psi_prime.num
        pp_den = psi_prime.den
        pp_series = (LSeries(0, pp_num.coeffs, th_cap) *
                     LSeries(0, pp_den.coeffs, th_cap).inverse())
        pp_ms = MSeries.from_lseries(pp_series.truncate(th_cap), "th")
        self.kernels = [self.l0]
        for _ in range(self.r_max):
            prev = self.kernels[-1]
            self.kernels.append(theta_derivative(prev, "th") + pp_ms * v1 * prev)
        y_ms = MSeries.from_lseries(self.y_x, "X")
        self.kernels_sub = [k.substitute("th", y_ms) for k in self.kernels]
        # the u-side exponent and prefactor
        self._build_u_side()

    def _build_u_side(self):
        u1 = MSeries.monomial(Rat(1), ("u",), (1,), windows=((0, self.u_hi),))
        hu = MSeries.monomial(Rat(1), ("h", "u"), (1, 1),
                              windows=((0, self.h_hi), (0, self.u_hi)))
        w_sum = MSeries.zero(("X", "h"), ((0, self.K + 1), (0, self.h_hi)))
        for g in range(0, self.g_max + 1):
            if g > 0 and not self.table.has(g, 1):
                if 2 * g <= self.h_hi and 2 * g - 1 <= self.table.chi_max:
                    raise DualityError("table lacks the (%d,1) entry" % g)
                continue
            s = self.table.one_point(g) if g > 0 else self.y_x
            if s is None:
                continue
            piece = MSeries.from_lseries(s.truncate(self.K + 1), "X")
            hpow = MSeries.monomial(Rat(1), ("h",), (2 * g,), windows=((0, self.h_hi),))
            w_sum = w_sum + piece * hpow
        # u S(ħ u X∂_X) Σ ħ^{2g} W(g,1) - u W(0,1): diagonal in the X-power
        dressed = w_sum.diag_apply("X", lambda k: _sinhc_scalar_ms(hu, k, self.h_hi))
        e_exp = (dressed - MSeries.from_lseries(self.y_x.truncate(self.K + 1), "X")) * u1
        self.exp_e = e_exp.exp("u") if e_exp.terms else MSeries.const(Rat(1))
        inv_s_hu = _sinhc_ms(hu, self.h_hi).unit_inverse()
        self.p0 = self.exp_e * inv_s_hu  # [u^r] of G picks [u^{r+1}] of p0 * u^b

    # -- cached pieces ---------------------------------------------------------------

    def _sinhc_of_k(self, k: int) -> MSeries:
        got = self._sinhc_k.get(k)
        if got is None:
            hu = MSeries.monomial(Rat(k), ("h", "u"), (1, 1),
                                  windows=((0, self.h_hi), (0, self.u_hi)))
            got = _sinhc_ms(hu, self.h_hi)
            self._sinhc_k[k] = got
        return got

    def leg_factor(self, series: LSeries) -> MSeries:
        """u · S(ħ u X ∂_X) applied to a univariate X-series."""
        got = self._leg_cache.get(series)
        if got is None:
            acc = None
            for k, c in series.items():
                if k > self.K + 1:
                    break
                piece = MSeries.monomial(c, ("X",), (k,)) * self._sinhc_of_k(k)
                acc = piece if acc is None else acc + piece
            if acc is None:
                acc = MSeries.zero(("X", "h", "u"),
                                   ((0, self.K + 1), (0, self.h_hi), (0, self.u_hi)))
            if series.hi is not None:
                acc = acc.truncate("X", min(series.hi, self.K + 1))
            else:
                acc = acc.truncate("X", self.K + 1)
            got = acc * MSeries.monomial(Rat(1), ("u",), (1,), windows=((0, self.u_hi),))
            self._leg_cache[series] = got
        return got

    def _vertex_image(self, a: int, b: int, c: int) -> MSeries:
        """The vertex chain applied to the monomial X^a u^b ħ^c: series in (w, ħ)."""
        got = self._images.get((a, b, c))
        if got is not None:
            return got
        mono = MSeries.monomial(Rat(1), ("X", "h"), (a, c))
        h = None
        for r in range(0, self.r_max + 1):
            want = r + 1 - b
            if want < 0 or want > self.u_hi:
                continue
            gr = self.p0.extract("u", want)
            if not gr.terms:
                continue
            piece = self.kernels_sub[r] * gr * mono
            h = piece if h is None else h + piece
        if h is None or not h.terms:
            out = MSeries.zero(("h", "w"), ((0, self.h_hi), (0, self.K)))
        else:
            h = self.jac_ms * h  # the dlogX/dlogw factor inside the braces
            if "v" not in h.vars:
                h = h.lift(tuple(sorted(set(h.vars) | {"v"})))
            acc = None
            for k in range(self.k_max, -1, -1):
                ak = h.extract("v", k)
                if acc is None:
                    acc = ak
                else:
                    acc = ak + self.jac_ms * _x_ddx(acc, "X")
            if acc is None or not acc.terms:
                out = MSeries.zero(("h", "w"), ((0, self.h_hi), (0, self.K)))
            else:
                out = acc.substitute("X", self.x_of_w_ms, neg_ok=True).truncate("w", self.K)
                if "h" not in out.vars:
                    out = out.lift(tuple(sorted(set(out.vars) | {"h"})))
        self._images[(a, b, c)] = out
        return out

    def vertex_value(self, f: MSeries) -> MSeries:
        """Linear extension of the vertex chain to a factor series in (X,u,ħ)."""
        acc = None
        vars_ = f.vars
        ix = vars_.index("X") if "X" in vars_ else None
        iu = vars_.index("u") if "u" in vars_ else None
        ih = vars_.index("h") if "h" in vars_ else None
        for e, coeff in f.terms.items():
            a = e[ix] if ix is not None else 0
            b = e[iu] if iu is not None else 0
            c = e[ih] if ih is not None else 0
            img = self._vertex_image(a, b, c).scale(coeff)
            acc = img if acc is None else acc + img
        if acc is None:
            return MSeries.zero(("h", "w"), ((0, self.h_hi), (0, self.K)))
        return acc

    def empty_vertex(self) -> MSeries:
        return self.vertex_value(MSeries.const(Rat(1), ("X", "u", "h")))

    # -- edge options ------------------------------------------------------------------

    def edge_options(self, edge, rem: int):
        """Per-edge contributions: (ħ-power used, coeff, list of (vertex, leg MSeries))."""
        size = len(edge)
        out = []
        for g in range(0, rem // 2 + 1):
            if (g, size) == (0, 2):
                continue  # handled below with the singular split
            if not self.table.has(g, size):
                if 2 * g - 2 + size <= self.table.chi_max and (g, size) != (0, 1):
                    raise DualityError("table lacks the (%d,%d) entry" % (g, size))
                continue
            for coeff, key in self.table.terms(g, size):
                legs = []
                for j, v in enumerate(edge):
                    s = key[j] if key[j] is not None else LSeries(0, (Rat(1),), self.K + 1)
                    legs.append((v, self.leg_factor(s.truncate(self.K + 1))))
                out.append((2 * g, coeff, legs))
        if size == 2:
            for coeff, key in self.table.terms(0, 2):
                legs = []
                for j, v in enumerate(edge):
                    s = key[j] if key[j] is not None else LSeries(0, (Rat(1),), self.K + 1)
                    legs.append((v, self.leg_factor(s.truncate(self.K + 1))))
                out.append((0, coeff, legs))
            if edge[0] != edge[1]:
                a, b = edge
                for j in range(1, self.sing_cap + 1):
                    leg_a = self.leg_factor(LSeries(j, (Rat(1),), None))
                    leg_b = self.leg_factor(LSeries(-j, (Rat(1),), None))
                    out.append((0, Rat(j), [(a, leg_a), (b, leg_b)]))
        return out

    # -- the transform ----------------------------------------------------------------

    def dual_npoint(self, g: int, n: int) -> SepSeries:
        if g > self.g_max or n > self.n_max:
            raise DualityError("target beyond configured caps")
        caps = (self.K,) * n
        out = SepSeries(n, caps)
        empty_val = None
        for graph in enumerate_graphs(n, g):
            betti = graph.betti()
            rem_after_betti = 2 * g - 2 * betti
            if rem_after_betti < 0:
                continue
            aut = graph.aut_order()
            options = [self.edge_options(e, rem_after_betti) for e in graph.edges]
            for combo in _product(options):
                h_used = sum(op[0] for op in combo)
                rem = rem_after_betti - h_used
                if rem < 0:
                    continue
                coeff = Rat(1, aut)
                for op in combo:
                    coeff = coeff * op[1]
                if not coeff:
                    continue
                per_vertex = [None] * n
                for op in combo:
                    for v, leg in op[2]:
                        per_vertex[v] = leg if per_vertex[v] is None \
                            else per_vertex[v] * leg
                vals = []
                dead = False
                for v in range(n):
                    if per_vertex[v] is None:
                        if empty_val is None:
                            empty_val = self.empty_vertex()
                        val = empty_val
                    else:
                        val = self.vertex_value(per_vertex[v])
                    if not val.terms:
                        dead = True
                        break
                    vals.append(val)
                if dead:
                    continue
                _accumulate_h_split(out, vals, rem, coeff)
        if n == 1:
            self._one_point_corrections(out, g)
        return out

    def _one_point_corrections(self, out: SepSeries, g: int):
        # Σ_k (w∂)^k [v^{k+1}] L0(v, θ)|θ=Y(X) · (w∂) W(0,1)(X), plus the
        # unstable (0,1) seed
        wd_y = self.jac_ms * _x_ddx(MSeries.from_lseries(self.y_x.truncate(self.K + 1),
                                                         "X"), "X")
        m = self.kernels_sub[0] * wd_y
        acc = None
        for k in range(self.k_max - 1, -1, -1):
            ak = m.extract("v", k + 1)
            if acc is None:
                acc = ak
            else:
                acc = ak + self.jac_ms * _x_ddx(acc, "X")
        if acc is not None and acc.terms:
            series = acc.substitute("X", self.x_of_w_ms, neg_ok=True).truncate("w", self.K)
            if "h" not in series.vars:
                series = series.lift(tuple(sorted(set(series.vars) | {"h"})))
            slice_ = series.extract("h", 2 * g)
            if slice_.terms:
                out.add_term(Rat(1), (slice_.to_lseries(),))
        if g == 0:
            y_w = MSeries.from_lseries(self.y_x.truncate(self.K + 1), "X").substitute(
                "X", self.x_of_w_ms, neg_ok=True)
            out.add_term(Rat(1), (y_w.to_lseries().truncate(self.K),))


def _product(lists):
    if not lists:
        yield ()
        return
    head, rest = lists[0], lists[1:]
    for h in head:
        for r in _product(rest):
            yield (h,) + r


def _accumulate_h_split(out: SepSeries, vals, rem: int, coeff):
    """Distribute [ħ^rem] across the per-vertex (w, ħ) series; outer products."""
    n = len(vals)
    slices = []
    for val in vals:
        if "h" not in val.vars:
            val = val.lift(tuple(sorted(set(val.vars) | {"h"})))
        per = {}
        for c in range(0, rem + 1):
            s = val.extract("h", c)
            if s.terms:
                per[c] = s.to_lseries()
        slices.append(per)

    def rec(i, left, factors):
        if i == n:
            if left == 0:
                out.add_term(coeff, tuple(factors))
            return
        for c, s in slices[i].items():
            if c <= left:
                rec(i + 1, left - c, factors + [s])

    rec(0, rem, [])


def _x_ddx(ms: MSeries, var: str) -> MSeries:
    i = ms.vars.index(var)
    return MSeries(ms.vars, ms.windows,
                   {e: c * e[i] for e, c in ms.terms.items() if e[i]})


def _sinhc_ms(arg: MSeries, order: int) -> MSeries:
    acc = MSeries.const(Rat(1), arg.vars, arg.windows)
    power = MSeries.const(Rat(1), arg.vars, arg.windows)
    j = 1
    while 2 * j <= order:
        power = power * arg * arg
        if not power.terms:
            break
        acc = acc + power.scale(sinhc_coeff(j))
        j += 1
    return acc


def _sinhc_scalar_ms(hu: MSeries, k: int, order: int) -> MSeries:
    """S(ħ u k) as a series in (h, u)."""
    if k == 0:
        return MSeries.const(Rat(1), hu.vars, hu.windows)
    return _sinhc_ms(hu.scale(Rat(k)), order)
