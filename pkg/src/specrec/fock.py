"""Charge-zero bosonic Fock space with truncation.

States are finite sums of monomials in q_1, q_2, ... indexed by partitions
(q_k realizing the k-th power sum), with coefficients that are truncated
multivariate series in ħ, the point variables carried by current insertions,
and the formal coupling parameters of the map models.  J_{-k} multiplies by
q_k, J_k = k ∂/∂q_k, J_0 = 0.

The diagonal Schur-basis operator scales s_λ by exp(Σ_{(i,j)∈λ} F(ħ(j-i), ħ));
the change of basis runs through Murnaghan–Nakayama characters, exactly.
Connected correlators are cumulants of core-normalized vacuum expectations.
"""

from __future__ import annotations

from functools import lru_cache

from .curve import PsiSpec
from .mseries import MSeries
from .rationals import Rat
from .series import LSeries, _min_cap
from .sfuncs import apply_shift_series, poly_as_mseries, sinhc_series


class FockError(ValueError):
    pass


# ---------------------------------------------------------------------------
# partitions and characters


def partitions_of(n):
    return _partitions_cached(n)


@lru_cache(maxsize=None)
def _partitions_cached(n, max_part=None):
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions_cached(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def z_centralizer(mu) -> int:
    acc = 1
    mult = {}
    for p in mu:
        mult[p] = mult.get(p, 0) + 1
    for p, m in mult.items():
        fact = 1
        for i in range(2, m + 1):
            fact *= i
        acc *= p ** m * fact
    return acc


@lru_cache(maxsize=None)
def character(lam, mu) -> int:
    """Symmetric group character χ^λ_μ by the Murnaghan–Nakayama rule.

    Border strips are removed through beta-numbers: subtracting the strip
    size from one beta-number, staying distinct; the sign counts the
    crossings.
    """
    if sum(lam) != sum(mu):
        raise FockError("character needs |λ| = |μ|")
    if not lam:
        return 1
    if not mu:
        return 0
    r = mu[0]
    rest = mu[1:]
    k = len(lam)
    betas = [lam[i] + (k - 1 - i) for i in range(k)]
    bset = set(betas)
    total = 0
    for b in betas:
        nb = b - r
        if nb < 0 or nb in bset:
            continue
        crossings = sum(1 for bj in betas if nb < bj < b)
        nbetas = sorted((x for x in betas if x != b), reverse=True)
        nbetas.append(nb)
        nbetas.sort(reverse=True)
        newlam = tuple(x - (k - 1 - j) for j, x in enumerate(nbetas))
        newlam = tuple(x for x in newlam if x > 0)
        sub = character(newlam, rest)
        if sub:
            total += (-1) ** crossings * sub
    return total


def contents(lam):
    out = []
    for i, row in enumerate(lam):
        for j in range(row):
            out.append(j - i)
    return out


def schur_in_powersums(lam):
    """s_λ = Σ_μ χ^λ_μ q_μ / z_μ; returns dict partition -> Rat."""
    n = sum(lam)
    out = {}
    for mu in partitions_of(n):
        chi = character(lam, mu)
        if chi:
            out[mu] = Rat(chi, z_centralizer(mu))
    return out


# ---------------------------------------------------------------------------
# diagonal weights


def psihat_theta_mseries(psi: PsiSpec, theta_cap: int, h_cap: int) -> MSeries:
    """F(θ, ħ) = S(ħ∂_θ)P(θ) + log R(θ) as a series in θ and ħ."""
    target = poly_as_mseries(psi.P, "th")
    h = MSeries.monomial(Rat(1), ("h",), (1,), windows=((0, h_cap),))
    p_part = apply_shift_series(sinhc_series(h_cap), h, target, "th")
    logr = psi.psi_theta_series(theta_cap) - LSeries(0, psi.P.coeffs, theta_cap)
    r_part = MSeries.from_lseries(logr, "th")
    return (p_part + r_part).truncate("th", theta_cap)


def eigenvalue_series(psi: PsiSpec, lam, h_cap: int) -> LSeries:
    """exp(Σ_{cells} F(ħ·content, ħ)) truncated at ħ^h_cap."""
    if psi.is_zero() or not lam:
        return LSeries(0, (Rat(1),), h_cap)
    fr = psihat_theta_mseries(psi, h_cap, h_cap)
    acc = LSeries(0, (), h_cap)
    cnt = {}
    for c in contents(lam):
        cnt[c] = cnt.get(c, 0) + 1
    for c, mult in cnt.items():
        sub = fr.substitute("th", MSeries.monomial(Rat(c), ("h",), (1,),
                                                   windows=((0, h_cap),)))
        acc = acc + sub.to_lseries() * mult
    return acc.exp()


# ---------------------------------------------------------------------------
# states


class FockState:
    """Map partition -> coefficient series; grading variables shared.

    max_part, when set, prunes parts that no truncated current could ever
    annihilate; this is exact within the point-variable windows.
    """

    def __init__(self, energy_cap: int, terms=None, max_part=None):
        self.energy_cap = energy_cap
        self.max_part = max_part
        self.terms = dict(terms or {})

    @staticmethod
    def vacuum(energy_cap: int, max_part=None):
        return FockState(energy_cap, {(): MSeries.const(Rat(1))}, max_part)

    def add_to(self, lam, coeff):
        if not coeff:
            return
        acc = self.terms.get(lam)
        s = coeff if acc is None else acc + coeff
        if s:
            self.terms[lam] = s
        else:
            self.terms.pop(lam, None)

    def scale(self, series) -> "FockState":
        out = FockState(self.energy_cap, max_part=self.max_part)
        for lam, c in self.terms.items():
            out.add_to(lam, c * series)
        return out

    def __add__(self, other):
        out = FockState(min(self.energy_cap, other.energy_cap), self.terms,
                        self.max_part)
        for lam, c in other.terms.items():
            out.add_to(lam, c)
        return out

    def energy_filter(self, cap) -> "FockState":
        return FockState(self.energy_cap,
                         {lam: c for lam, c in self.terms.items() if sum(lam) <= cap},
                         self.max_part)

    def apply_J(self, k: int) -> "FockState":
        """J_k for k>0 (annihilation), J_{-k} via negative k, J_0 = 0."""
        out = FockState(self.energy_cap, max_part=self.max_part)
        if k == 0:
            return out
        for lam, c in self.terms.items():
            if k > 0:
                m = lam.count(k)
                if not m:
                    continue
                new = list(lam)
                new.remove(k)
                out.add_to(tuple(new), c * (k * m))
            else:
                kk = -k
                if self.max_part is not None and kk > self.max_part:
                    continue
                if sum(lam) + kk > self.energy_cap:
                    continue
                new = tuple(sorted(lam + (kk,), reverse=True))
                out.add_to(new, c)
        return out

    def apply_diagonal(self, psi: PsiSpec, h_cap: int) -> "FockState":
        """Schur-diagonal operator via exact character transforms per energy."""
        if psi.is_zero():
            return self
        by_size = {}
        for lam, c in self.terms.items():
            by_size.setdefault(sum(lam), {})[lam] = c
        out = FockState(self.energy_cap, max_part=self.max_part)
        for n, block in by_size.items():
            if n == 0:
                for lam, c in block.items():
                    out.add_to(lam, c)
                continue
            parts = partitions_of(n)
            # powersum -> schur: state Σ c_μ q_μ = Σ_λ (Σ_μ χ^λ_μ c_μ) s_λ
            for lam in parts:
                s_coeff = None
                for mu, c in block.items():
                    chi = character(lam, mu)
                    if chi:
                        piece = c * Rat(chi)
                        s_coeff = piece if s_coeff is None else s_coeff + piece
                if s_coeff is None:
                    continue
                eig = MSeries.from_lseries(eigenvalue_series(psi, lam, h_cap), "h")
                s_coeff = s_coeff * eig
                # schur -> powersum: s_λ = Σ_μ χ^λ_μ q_μ / z_μ
                for mu in parts:
                    if self.max_part is not None and mu and mu[0] > self.max_part:
                        continue
                    chi = character(lam, mu)
                    if chi:
                        out.add_to(mu, s_coeff * Rat(chi, z_centralizer(mu)))
        return out

    def apply_exp_ladder(self, couplings, sign: int) -> "FockState":
        """exp(Σ_i c_i J_{sign·i} / (i ħ)) with formal coupling decorations.

        couplings: dict i -> MSeries (typically the formal variable for that
        coupling).  Creation for sign=-1, annihilation for sign=+1; ladder
        letters all commute for a fixed sign, so the exponential factorizes.
        """
        state = self
        hinv = MSeries.monomial(Rat(1), ("h",), (-1,))
        for i, coup in sorted(couplings.items()):
            if not coup:
                continue
            letter = coup * hinv.scale(Rat(1, i))
            new = FockState(self.energy_cap, max_part=self.max_part)
            for lam, c in state.terms.items():
                new.add_to(lam, c)
                cur_lam, cur_c = lam, c
                k = 1
                while True:
                    if sign < 0:
                        if sum(cur_lam) + i > self.energy_cap:
                            break
                        cur_lam = tuple(sorted(cur_lam + (i,), reverse=True))
                        cur_c = cur_c * letter.scale(Rat(1, k))
                    else:
                        m = cur_lam.count(i)
                        if not m:
                            break
                        newlam = list(cur_lam)
                        newlam.remove(i)
                        cur_lam = tuple(newlam)
                        cur_c = cur_c * letter.scale(Rat(i * m, k))
                    if not cur_c:
                        break
                    new.add_to(cur_lam, cur_c)
                    k += 1
            state = new
        return state

    def apply_current(self, var: str, pos_cap: int, neg_capacity: int) -> "FockState":
        """Apply Σ_j J_j var^j with j from -neg_capacity to pos_cap (j != 0)."""
        out = FockState(self.energy_cap, max_part=self.max_part)
        for j in range(1, pos_cap + 1):
            mono = MSeries.monomial(Rat(1), (var,), (j,),
                                    windows=((-(neg_capacity or 1), pos_cap),))
            piece = self.apply_J(j)
            for lam, c in piece.terms.items():
                out.add_to(lam, c * mono)
        for j in range(1, neg_capacity + 1):
            mono = MSeries.monomial(Rat(1), (var,), (-j,),
                                    windows=((-neg_capacity, pos_cap),))
            piece = self.apply_J(-j)
            for lam, c in piece.terms.items():
                out.add_to(lam, c * mono)
        return out

    def vacuum_part(self) -> MSeries:
        return self.terms.get((), MSeries.const(Rat(0)))

    def truncate_var(self, var, hi) -> "FockState":
        out = FockState(self.energy_cap, max_part=self.max_part)
        for lam, c in self.terms.items():
            if var in c.vars:
                c = c.truncate(var, hi)
            out.add_to(lam, c)
        return out


def schur_state(lam, energy_cap: int) -> FockState:
    if sum(lam) > energy_cap:
        raise FockError("partition exceeds the energy cap")
    out = FockState(energy_cap)
    for mu, c in schur_in_powersums(tuple(lam)).items():
        out.add_to(mu, MSeries.const(c))
    return out


# ---------------------------------------------------------------------------
# connected correlators


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def build_z_state(coeff_fn, chi_entries, energy_cap: int, h_hi: int,
                  max_part=None) -> FockState:
    """The truncated exponential Z|0> from expansion coefficients.

    coeff_fn(g, m, ks) returns the coefficient for the sorted positive tuple
    ks (len m); chi_entries lists the (g, m) families to include.  Letters
    carry ħ^(2g-2+m); the energy cap bounds everything.
    """
    state = FockState.vacuum(energy_cap, max_part=max_part)
    for g, m in chi_entries:
        hpow = 2 * g - 2 + m
        for ks in _sorted_tuples(m, energy_cap, max_part):
            c = coeff_fn(g, m, ks)
            if not c:
                continue
            mult = {}
            for k in ks:
                mult[k] = mult.get(k, 0) + 1
            denom = Rat(1)
            for k, mm in mult.items():
                fact = 1
                for i in range(2, mm + 1):
                    fact *= i
                denom *= Rat(k) ** mm * fact
            scalar = c / denom
            letter = MSeries.monomial(scalar, ("h",), (hpow,))  # exact monomial
            # exp of this commuting letter: add j copies of the parts ks
            new = FockState(energy_cap, max_part=max_part)
            for lam, coeff in state.terms.items():
                new.add_to(lam, coeff)
                cur_lam, cur_c = lam, coeff
                j = 1
                while True:
                    if sum(cur_lam) + sum(ks) > energy_cap:
                        break
                    cur_lam = tuple(sorted(cur_lam + ks, reverse=True))
                    cur_c = (cur_c * letter).scale(Rat(1, j))
                    cur_c = cur_c.truncate("h", h_hi) if "h" in cur_c.vars else cur_c
                    if not cur_c:
                        break
                    new.add_to(cur_lam, cur_c)
                    j += 1
            state = new
    return state


def _sorted_tuples(m, total_cap, max_part=None):
    """Weakly decreasing positive tuples of length m with sum <= total_cap."""
    if m == 0:
        yield ()
        return
    top = total_cap if max_part is None else min(max_part, total_cap)

    def rec(length, biggest, budget):
        if length == 0:
            yield ()
            return
        for first in range(min(biggest, budget - (length - 1)), 0, -1):
            for rest in rec(length - 1, first, budget - first):
                yield (first,) + rest
    yield from rec(m, top, total_cap)


def mn_point_oracle(coeff_fn, chi_entries, psi: PsiSpec, g: int, m: int, n: int,
                    point_cap: int, x_names=None, w_names=None) -> MSeries:
    """The (m,n)-point function from the operator side, order point_cap.

    <0| w-currents · diag(ψ) · X-currents · Z |0>, connected, coefficient of
    ħ^(2g-2+m+n).  For n = 0 the diagonal operator is omitted (the pure
    ordinary-side correlator).
    """
    T = 2 * g - 2 + m + n
    x_names = x_names or tuple("X%d" % (i + 1) for i in range(m))
    w_names = w_names or tuple("w%d" % (i + 1) for i in range(m, m + n))
    energy = point_cap * (m + n)
    # every ħ^{-1} rides on one unit of created energy, so supports stay
    # above -energy and caps at T + energy survive all products
    h_work = T + energy
    base = build_z_state(coeff_fn, chi_entries, energy, h_work, max_part=point_cap)
    base = base.truncate_var("h", h_work)

    cache = {}

    def disc(subset):
        got = cache.get(subset)
        if got is not None:
            return got
        xs = [i for i in subset if i < m]
        ws = [i for i in subset if i >= m]
        state = base.energy_filter(point_cap * len(subset))
        # X-currents right of the diagonal operator, rightmost first; all the
        # w-currents sit further left and add to the absorbency
        state = _apply_current_block(state, [x_names[i] for i in sorted(xs)],
                                     point_cap, h_work, extra=point_cap * len(ws))
        if n and ws and not psi.is_zero():
            state = state.apply_diagonal(psi, h_work + energy + 2)
            state = state.truncate_var("h", h_work)
        state = _apply_current_block(state, [w_names[i - m] for i in sorted(ws)],
                                     point_cap, h_work)
        val = state.vacuum_part()
        cache[subset] = val
        return val

    total = connected_from_blocks(disc, m + n)
    if "h" not in total.vars:
        total = total.lift(tuple(sorted(set(total.vars) | {"h"})))
    return total.extract("h", T)


def _apply_current_block(state: FockState, names, point_cap: int, h_hi: int,
                         extra: int = 0) -> FockState:
    """Apply currents named right-to-left with energy caps from absorbency.

    extra counts positive powers still available from currents left of this
    whole block.
    """
    for pos in range(len(names) - 1, -1, -1):
        capacity_left = point_cap * pos + extra
        state = state.apply_current(names[pos], point_cap, capacity_left)
        state = state.energy_filter(capacity_left)
        state = state.truncate_var("h", h_hi)
    return state


def maps_npoint(side: str, g: int, count: int, t_coeffs: dict, s_coeffs: dict,
                psi1: PsiSpec, psi: PsiSpec, point_cap: int, coupling_deg: int,
                names=None) -> MSeries:
    """Generating function of generalized maps, ordinary or fully-simple side.

    <0| currents [diag(ψ) if fully-simple] e^{Σ t_i J_i/(iħ)} diag(ψ1)
    e^{Σ s_i J_{-i}/(iħ)} |0>, connected and core-normalized, coefficient of
    ħ^(2g-2+count).  The couplings t_i, s_i are formal variables truncated at
    total degree coupling_deg (the series are not summable at numeric
    couplings once the diagonal weights carry ħ).

    Internally the tracked ħ-exponent is shifted by the coupling degree (one
    ħ^{-1} rides on each coupling letter), so all exponents stay nonnegative
    and the truncation windows are exact.
    """
    if side not in ("ordinary", "fully-simple"):
        raise FockError("side must be ordinary or fully-simple")
    T = 2 * g - 2 + count
    names = names or tuple(("X%d" if side == "ordinary" else "w%d") % (i + 1)
                           for i in range(count))
    max_s = max([0] + list(s_coeffs))
    energy = point_cap * count + max_s * coupling_deg * max(1, len(s_coeffs))
    tvars = {i: "t%d" % i for i in t_coeffs}
    svars = {i: "s%d" % i for i in s_coeffs}
    # letters WITHOUT the 1/ħ: the shifted exponent is e_h + (coupling degree)
    svar_series = {i: MSeries.monomial(Rat(v), (svars[i],), (1,),
                                       windows=((0, coupling_deg),)).scale(Rat(1, i))
                   for i, v in s_coeffs.items()}
    tvar_series = {i: MSeries.monomial(Rat(v), (tvars[i],), (1,),
                                       windows=((0, coupling_deg),)).scale(Rat(1, i))
                   for i, v in t_coeffs.items()}
    letters_cap = coupling_deg
    h_work = T + letters_cap
    if h_work < 0:
        return MSeries.zero(names + ("h",))
    core = FockState.vacuum(energy, max_part=max(point_cap, max_s))
    core = _apply_plain_ladder(core, svar_series, -1)
    core = core.apply_diagonal(psi1, h_work)
    core = core.truncate_var("h", h_work)
    core = _apply_plain_ladder(core, tvar_series, +1)
    core = core.truncate_var("h", h_work)
    grading = list(tvars.values()) + list(svars.values())
    core = _truncate_couplings(core, grading, coupling_deg)
    if side == "fully-simple":
        core = core.apply_diagonal(psi, h_work)
        core = core.truncate_var("h", h_work)

    cache = {}

    def disc(subset):
        got = cache.get(subset)
        if got is not None:
            return got
        state = core.energy_filter(point_cap * len(subset))
        state = _apply_current_block(state, [names[i] for i in sorted(subset)],
                                     point_cap, h_work)
        val = _truncate_coupling_series(state.vacuum_part(), grading, coupling_deg)
        cache[subset] = val
        return val

    normalizer = disc(())

    def trunc(ms):
        return _truncate_coupling_series(ms, grading, coupling_deg)

    def inv(ms):
        return trunc(ms.unit_inverse(grading=[v for v in grading if v in ms.vars]
                                     or None))

    total = connected_from_blocks(disc, count, normalizer=normalizer, invert=inv,
                                  fix=trunc)
    # undo the exponent shift: true ħ-power = stored power - coupling degree
    if "h" not in total.vars:
        total = total.lift(tuple(sorted(set(total.vars) | {"h"})))
    hidx = total.vars.index("h")
    gidx = [total.vars.index(v) for v in grading if v in total.vars]
    out_vars = total.vars[:hidx] + total.vars[hidx + 1:]
    out_wins = total.windows[:hidx] + total.windows[hidx + 1:]
    terms = {}
    for e, c in total.terms.items():
        if e[hidx] - sum(e[i] for i in gidx) == T:
            terms[e[:hidx] + e[hidx + 1:]] = c
    return MSeries(out_vars, out_wins, terms)


def _apply_plain_ladder(state: FockState, couplings, sign: int) -> FockState:
    """exp(Σ_i c_i J_{sign·i}) without the 1/ħ (tracked through the couplings)."""
    for i, coup in sorted(couplings.items()):
        if not coup:
            continue
        new = FockState(state.energy_cap, max_part=state.max_part)
        for lam, c in state.terms.items():
            new.add_to(lam, c)
            cur_lam, cur_c = lam, c
            k = 1
            while True:
                if sign < 0:
                    if sum(cur_lam) + i > state.energy_cap or                             (state.max_part is not None and i > state.max_part):
                        break
                    cur_lam = tuple(sorted(cur_lam + (i,), reverse=True))
                    cur_c = (cur_c * coup).scale(Rat(1, k))
                else:
                    m = cur_lam.count(i)
                    if not m:
                        break
                    newlam = list(cur_lam)
                    newlam.remove(i)
                    cur_lam = tuple(newlam)
                    cur_c = (cur_c * coup).scale(Rat(i * m, k))
                if not cur_c:
                    break
                new.add_to(cur_lam, cur_c)
                k += 1
        state = new
    return state


def _truncate_coupling_series(ms: MSeries, names, deg: int) -> MSeries:
    idx = [ms.vars.index(v) for v in names if v in ms.vars]
    if not idx:
        return ms
    terms = {e: v for e, v in ms.terms.items() if sum(e[i] for i in idx) <= deg}
    return MSeries(ms.vars, ms.windows, terms)


def _truncate_couplings(state: FockState, names, deg: int) -> FockState:
    out = FockState(state.energy_cap, max_part=state.max_part)
    for lam, c in state.terms.items():
        out.add_to(lam, _truncate_coupling_series(c, names, deg))
    return out


def connected_from_blocks(disc, n: int, normalizer=None, invert=None, fix=None):
    """Cumulant over set partitions: Σ_π (-1)^{|π|-1}(|π|-1)! Π disc(block).

    disc maps a sorted tuple of current indices to an MSeries; blocks are
    normalized by disc(()) when a normalizer inverse is supplied.  fix, when
    given, restores invariant-backed windows after each product (per-variable
    windows cannot express correlated gradings like ħ-valuation bounded by
    coupling degree).
    """
    fix = fix or (lambda ms: ms)
    norm_inv = None
    if normalizer is not None:
        norm_inv = normalizer.unit_inverse() if invert is None else invert(normalizer)
        norm_inv = fix(norm_inv)
    total = None
    for part in set_partitions(range(n)):
        k = len(part)
        fact = 1
        for i in range(1, k):
            fact *= i
        sign = Rat((-1) ** (k - 1) * fact)
        piece = None
        for block in part:
            b = disc(tuple(sorted(block)))
            if norm_inv is not None:
                b = fix(b * norm_inv)
            piece = b if piece is None else fix(piece * b)
        piece = piece.scale(sign)
        total = piece if total is None else total + piece
    return total


class FockState:
    """Map partition -> coefficient series; grading variables shared.

    max_part, when set, prunes parts that no truncated current could ever
    annihilate; this is exact within the point-variable windows.
    """

    def __init__(self, energy_cap: int, terms=None, max_part=None):
        self.energy_cap = energy_cap
        self.max_part = max_part
        self.terms = dict(terms or {})

    @staticmethod
    def vacuum(energy_cap: int, max_part=None):
        return FockState(energy_cap, {(): MSeries.const(Rat(1))}, max_part)

    def add_to(self, lam, coeff):
        if not coeff:
            return
        acc = self.terms.get(lam)
        s = coeff if acc is None else acc + coeff
        if s:
            self.terms[lam] = s
        else:
            self.terms.pop(lam, None)

    def scale(self, series) -> "FockState":
        out = FockState(self.energy_cap, max_part=self.max_part)
        for lam, c in self.terms.items():
            out.add_to(lam, c * series)
        return out

    def __add__(self, other):
        out = FockState(min(self.energy_cap, other.energy_cap), self.terms,
                        self.max_part)
        for lam, c in other.terms.items():
            out.add_to(lam, c)
        return out

    def energy_filter(self, cap) -> "FockState":
        return FockState(self.energy_cap,
                         {lam: c for lam, c in self.terms.items() if sum(lam) <= cap},
                         self.max_part)

    def apply_J(self, k: int) -> "FockState":
        """J_k for k>0 (annihilation), J_{-k} via negative k, J_0 = 0."""
        out = FockState(self.energy_cap, max_part=self.max_part)
        if k == 0:
            return out
        for lam, c in self.terms.items():
            if k > 0:
                m = lam.count(k)
                if not m:
                    continue
                new = list(lam)
                new.remove(k)
                out.add_to(tuple(new), c * (k * m))
            else:
                kk = -k
                if self.max_part is not None and kk > self.max_part:
                    continue
                if sum(lam) + kk > self.energy_cap:
                    continue
                new = tuple(sorted(lam + (kk,), reverse=True))
                out.add_to(new, c)
        return out

    def apply_diagonal(self, psi: PsiSpec, h_cap: int) -> "FockState":
        """Schur-diagonal operator via exact character transforms per energy."""
        if psi.is_zero():
            return self
        by_size = {}
        for lam, c in self.terms.items():
            by_size.setdefault(sum(lam), {})[lam] = c
        out = FockState(self.energy_cap, max_part=self.max_part)
        for n, block in by_size.items():
            if n == 0:
                for lam, c in block.items():
                    out.add_to(lam, c)
                continue
            parts = partitions_of(n)
            # powersum -> schur: state Σ c_μ q_μ = Σ_λ (Σ_μ χ^λ_μ c_μ) s_λ
            for lam in parts:
                s_coeff = None
                for mu, c in block.items():
                    chi = character(lam, mu)
                    if chi:
                        piece = c * Rat(chi)
                        s_coeff = piece if s_coeff is None else s_coeff + piece
                if s_coeff is None:
                    continue
                eig = MSeries.from_lseries(eigenvalue_series(psi, lam, h_cap), "h")
                s_coeff = s_coeff * eig
                # schur -> powersum: s_λ = Σ_μ χ^λ_μ q_μ / z_μ
                for mu in parts:
                    if self.max_part is not None and mu and mu[0] > self.max_part:
                        continue
                    chi = character(lam, mu)
                    if chi:
                        out.add_to(mu, s_coeff * Rat(chi, z_centralizer(mu)))
        return out

    def apply_exp_ladder(self, couplings, sign: int) -> "FockState":
        """exp(Σ_i c_i J_{sign·i} / (i ħ)) with formal coupling decorations.

        couplings: dict i -> MSeries (typically the formal variable for that
        coupling).  Creation for sign=-1, annihilation for sign=+1; ladder
        letters all commute for a fixed sign, so the exponential factorizes.
        """
        state = self
        hinv = MSeries.monomial(Rat(1), ("h",), (-1,))
        for i, coup in sorted(couplings.items()):
            if not coup:
                continue
            letter = coup * hinv.scale(Rat(1, i))
            new = FockState(self.energy_cap, max_part=self.max_part)
            for lam, c in state.terms.items():
                new.add_to(lam, c)
                cur_lam, cur_c = lam, c
                k = 1
                while True:
                    if sign < 0:
                        if sum(cur_lam) + i > self.energy_cap:
                            break
                        cur_lam = tuple(sorted(cur_lam + (i,), reverse=True))
                        cur_c = cur_c * letter.scale(Rat(1, k))
                    else:
                        m = cur_lam.count(i)
                        if not m:
                            break
                        newlam = list(cur_lam)
                        newlam.remove(i)
                        cur_lam = tuple(newlam)
                        cur_c = cur_c * letter.scale(Rat(i * m, k))
                    if not cur_c:
                        break
                    new.add_to(cur_lam, cur_c)
                    k += 1
            state = new
        return state

    def apply_current(self, var: str, pos_cap: int, neg_capacity: int) -> "FockState":
        """Apply Σ_j J_j var^j with j from -neg_capacity to pos_cap (j != 0)."""
        out = FockState(self.energy_cap, max_part=self.max_part)
        for j in range(1, pos_cap + 1):
            mono = MSeries.monomial(Rat(1), (var,), (j,),
                                    windows=((-(neg_capacity or 1), pos_cap),))
            piece = self.apply_J(j)
            for lam, c in piece.terms.items():
                out.add_to(lam, c * mono)
        for j in range(1, neg_capacity + 1):
            mono = MSeries.monomial(Rat(1), (var,), (-j,),
                                    windows=((-neg_capacity, pos_cap),))
            piece = self.apply_J(-j)
            for lam, c in piece.terms.items():
                out.add_to(lam, c * mono)
        return out

    def vacuum_part(self) -> MSeries:
        return self.terms.get((), MSeries.const(Rat(0)))

    def truncate_var(self, var, hi) -> "FockState":
        out = FockState(self.energy_cap, max_part=self.max_part)
        for lam, c in self.terms.items():
            if var in c.vars:
                c = c.truncate(var, hi)
            out.add_to(lam, c)
        return out


def schur_state(lam, energy_cap: int) -> FockState:
    if sum(lam) > energy_cap:
        raise FockError("partition exceeds the energy cap")
    out = FockState(energy_cap)
    for mu, c in schur_in_powersums(tuple(lam)).items():
        out.add_to(mu, MSeries.const(c))
    return out


# ---------------------------------------------------------------------------
# connected correlators


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def build_z_state(coeff_fn, chi_entries, energy_cap: int, h_hi: int,
                  max_part=None) -> FockState:
    """The truncated exponential Z|0> from expansion coefficients.

    coeff_fn(g, m, ks) returns the coefficient for the sorted positive tuple
    ks (len m); chi_entries lists the (g, m) families to include.  Letters
    carry ħ^(2g-2+m); the energy cap bounds everything.
    """
    state = FockState.vacuum(energy_cap, max_part=max_part)
    for g, m in chi_entries:
        hpow = 2 * g - 2 + m
        for ks in _sorted_tuples(m, energy_cap, max_part):
            c = coeff_fn(g, m, ks)
            if not c:
                continue
            mult = {}
            for k in ks:
                mult[k] = mult.get(k, 0) + 1
            denom = Rat(1)
            for k, mm in mult.items():
                fact = 1
                for i in range(2, mm + 1):
                    fact *= i
                denom *= Rat(k) ** mm * fact
            scalar = c / denom
            letter = MSeries.monomial(scalar, ("h",), (hpow,))  # exact monomial
            # exp of this commuting letter: add j copies of the parts ks
            new = FockState(energy_cap, max_part=max_part)
            for lam, coeff in state.terms.items():
                new.add_to(lam, coeff)
                cur_lam, cur_c = lam, coeff
                j = 1
                while True:
                    if sum(cur_lam) + sum(ks) > energy_cap:
                        break
                    cur_lam = tuple(sorted(cur_lam + ks, reverse=True))
                    cur_c = (cur_c * letter).scale(Rat(1, j))
                    cur_c = cur_c.truncate("h", h_hi) if "h" in cur_c.vars else cur_c
                    if not cur_c:
                        break
                    new.add_to(cur_lam, cur_c)
                    j += 1
            state = new
    return state


def _sorted_tuples(m, total_cap, max_part=None):
    """Weakly decreasing positive tuples of length m with sum <= total_cap."""
    if m == 0:
        yield ()
        return
    top = total_cap if max_part is None else min(max_part, total_cap)

    def rec(length, biggest, budget):
        if length == 0:
            yield ()
            return
        for first in range(min(biggest, budget - (length - 1)), 0, -1):
            for rest in rec(length - 1, first, budget - first):
                yield (first,) + rest
    yield from rec(m, top, total_cap)


def mn_point_oracle(coeff_fn, chi_entries, psi: PsiSpec, g: int, m: int, n: int,
                    point_cap: int, x_names=None, w_names=None) -> MSeries:
    """The (m,n)-point function from the operator side, order point_cap.

    <0| w-currents · diag(ψ) · X-currents · Z |0>, connected, coefficient of
    ħ^(2g-2+m+n).  For n = 0 the diagonal operator is omitted (the pure
    ordinary-side correlator).
    """
    T = 2 * g - 2 + m + n
    x_names = x_names or tuple("X%d" % (i + 1) for i in range(m))
    w_names = w_names or tuple("w%d" % (i + 1) for i in range(m, m + n))
    energy = point_cap * (m + n)
    # every ħ^{-1} rides on one unit of created energy, so supports stay
    # above -energy and caps at T + energy survive all products
    h_work = T + energy
    base = build_z_state(coeff_fn, chi_entries, energy, h_work, max_part=point_cap)
    base = base.truncate_var("h", h_work)

    cache = {}

    def disc(subset):
        got = cache.get(subset)
        if got is not None:
            return got
        xs = [i for i in subset if i < m]
        ws = [i for i in subset if i >= m]
        state = base.energy_filter(point_cap * len(subset))
        # X-currents right of the diagonal operator, rightmost first; all the
        # w-currents sit further left and add to the absorbency
        state = _apply_current_block(state, [x_names[i] for i in sorted(xs)],
                                     point_cap, h_work, extra=point_cap * len(ws))
        if n and ws and not psi.is_zero():
            state = state.apply_diagonal(psi, h_work + energy + 2)
            state = state.truncate_var("h", h_work)
        state = _apply_current_block(state, [w_names[i - m] for i in sorted(ws)],
                                     point_cap, h_work)
        val = state.vacuum_part()
        cache[subset] = val
        return val

    total = connected_from_blocks(disc, m + n)
    if "h" not in total.vars:
        total = total.lift(tuple(sorted(set(total.vars) | {"h"})))
    return total.extract("h", T)


def _apply_current_block(state: FockState, names, point_cap: int, h_hi: int,
                         extra: int = 0) -> FockState:
    """Apply currents named right-to-left with energy caps from absorbency.

    extra counts positive powers still available from currents left of this
    whole block.
    """
    for pos in range(len(names) - 1, -1, -1):
        capacity_left = point_cap * pos + extra
        state = state.apply_current(names[pos], point_cap, capacity_left)
        state = state.energy_filter(capacity_left)
        state = state.truncate_var("h", h_hi)
    return state


def maps_npoint(side: str, g: int, count: int, t_coeffs: dict, s_coeffs: dict,
                psi1: PsiSpec, psi: PsiSpec, point_cap: int, coupling_deg: int,
                names=None) -> MSeries:
    """Generating function of generalized maps, ordinary or fully-simple side.

    <0| currents [diag(ψ) if fully-simple] e^{Σ t_i J_i/(iħ)} diag(ψ1)
    e^{Σ s_i J_{-i}/(iħ)} |0>, connected and core-normalized, coefficient of
    ħ^(2g-2+count).  The couplings t_i, s_i are formal variables truncated at
    total degree coupling_deg (the series are not summable at numeric
    couplings once the diagonal weights carry ħ).

    Internally the tracked ħ-exponent is shifted by the coupling degree (one
    ħ^{-1} rides on each coupling letter), so all exponents stay nonnegative
    and the truncation windows are exact.
    """
    if side not in ("ordinary", "fully-simple"):
        raise FockError("side must be ordinary or fully-simple")
    T = 2 * g - 2 + count
    names = names or tuple(("X%d" if side == "ordinary" else "w%d") % (i + 1)
                           for i in range(count))
    max_s = max([0] + list(s_coeffs))
    energy = point_cap * count + max_s * coupling_deg * max(1, len(s_coeffs))
    tvars = {i: "t%d" % i for i in t_coeffs}
    svars = {i: "s%d" % i for i in s_coeffs}
    # letters WITHOUT the 1/ħ: the shifted exponent is e_h + (coupling degree)
    svar_series = {i: MSeries.monomial(Rat(v), (svars[i],), (1,),
                                       windows=((0, coupling_deg),)).scale(Rat(1, i))
                   for i, v in s_coeffs.items()}
    tvar_series = {i: MSeries.monomial(Rat(v), (tvars[i],), (1,),
                                       windows=((0, coupling_deg),)).scale(Rat(1, i))
                   for i, v in t_coeffs.items()}
    letters_cap = coupling_deg
    h_work = T + letters_cap
    if h_work < 0:
        return MSeries.zero(names + ("h",))
    core = FockState.vacuum(energy, max_part=max(point_cap, max_s))
    core = _apply_plain_ladder(core, svar_series, -1)
    core = core.apply_diagonal(psi1, h_work)
    core = core.truncate_var("h", h_work)
    core = _apply_plain_ladder(core, tvar_series, +1)
    core = core.truncate_var("h", h_work)
    grading = list(tvars.values()) + list(svars.values())
    core = _truncate_couplings(core, grading, coupling_deg)
    if side == "fully-simple":
        core = core.apply_diagonal(psi, h_work)
        core = core.truncate_var("h", h_work)

    cache = {}

    def disc(subset):
        got = cache.get(subset)
        if got is not None:
            return got
        state = core.energy_filter(point_cap * len(subset))
        state = _apply_current_block(state, [names[i] for i in sorted(subset)],
                                     point_cap, h_work)
        val = _truncate_coupling_series(state.vacuum_part(), grading, coupling_deg)
        cache[subset] = val
        return val

    normalizer = disc(())

    def trunc(ms):
        return _truncate_coupling_series(ms, grading, coupling_deg)

    def inv(ms):
        return trunc(ms.unit_inverse(grading=[v for v in grading if v in ms.vars]
                                     or None))

    total = connected_from_blocks(disc, count, normalizer=normalizer, invert=inv,
                                  fix=trunc)
    # undo the exponent shift: true ħ-power = stored power - coupling degree
    if "h" not in total.vars:
        total = total.lift(tuple(sorted(set(total.vars) | {"h"})))
    hidx = total.vars.index("h")
    gidx = [total.vars.index(v) for v in grading if v in total.vars]
    out_vars = total.vars[:hidx] + total.vars[hidx + 1:]
    out_wins = total.windows[:hidx] + total.windows[hidx + 1:]
    terms = {}
    for e, c in total.terms.items():
        if e[hidx] - sum(e[i] for i in gidx) == T:
            terms[e[:hidx] + e[hidx + 1:]] = c
    return MSeries(out_vars, out_wins, terms)


def _apply_plain_ladder(state: FockState, couplings, sign: int) -> FockState:
    """exp(Σ_i c_i J_{sign·i}) without the 1/ħ (tracked through the couplings)."""
    for i, coup in sorted(couplings.items()):
        if not coup:
            continue
        new = FockState(state.energy_cap, max_part=state.max_part)
        for lam, c in state.terms.items():
            new.add_to(lam, c)
            cur_lam, cur_c = lam, c
            k = 1
            while True:
                if sign < 0:
                    if sum(cur_lam) + i > state.energy_cap or                             (state.max_part is not None and i > state.max_part):
                        break
                    cur_lam = tuple(sorted(cur_lam + (i,), reverse=True))
                    cur_c = (cur_c * coup).scale(Rat(1, k))
                else:
                    m = cur_lam.count(i)
                    if not m:
                        break
                    newlam = list(cur_lam)
                    newlam.remove(i)
                    cur_lam = tuple(newlam)
                    cur_c = (cur_c * coup).scale(Rat(i * m, k))
                if not cur_c:
                    break
                new.add_to(cur_lam, cur_c)
                k += 1
        state = new
    return state


def _truncate_coupling_series(ms: MSeries, names, deg: int) -> MSeries:
    idx = [ms.vars.index(v) for v in names if v in ms.vars]
    if not idx:
        return ms
    terms = {e: v for e, v in ms.terms.items() if sum(e[i] for i in idx) <= deg}
    return MSeries(ms.vars, ms.windows, terms)


def _truncate_couplings(state: FockState, names, deg: int) -> FockState:
    out = FockState(state.energy_cap, max_part=state.max_part)
    for lam, c in state.terms.items():
        out.add_to(lam, _truncate_coupling_series(c, names, deg))
    return out


def connected_from_blocks(disc, n: int, normalizer=None, invert=None, fix=None):
    """Cumulant over set partitions: Σ_π (-1)^{|π|-1}(|π|-1)! Π disc(block).

    disc maps a sorted tuple of current indices to an MSeries; blocks are
    normalized by disc(()) when a normalizer inverse is supplied.  fix, when
    given, restores invariant-backed windows after each product (per-variable
    windows cannot express correlated gradings like ħ-valuation bounded by
    coupling degree).
    """
    fix = fix or (lambda ms: ms)
    norm_inv = None
    if normalizer is not None:
        norm_inv = normalizer.unit_inverse() if invert is None else invert(normalizer)
        norm_inv = fix(norm_inv)
    total = None
    for part in set_partitions(range(n)):
        k = len(part)
        fact = 1
        for i in range(1, k):
            fact *= i
        sign = Rat((-1) ** (k - 1) * fact)
        piece = None
        for block in part:
            b = disc(tuple(sorted(block)))
            if norm_inv is not None:
                b = fix(b * norm_inv)
            piece = b if piece is None else fix(piece * b)
        piece = piece.scale(sign)
        total = piece if total is None else total + piece
    return total


def reset_h_window(ms: MSeries, coupling_vars, h_hi: int) -> MSeries:
    """Re-certify the ħ window from the letters invariant.

    Every ħ^{-1} rides on a coupling letter, so the ħ-valuation of each term
    is at least minus its total coupling degree; within the retained coupling
    degrees the ħ-coefficients are complete up to h_hi.  Verified term by
    term before widening.
    """
    if "h" not in ms.vars:
        return ms
    hi_idx = ms.vars.index("h")
    cidx = [ms.vars.index(v) for v in coupling_vars if v in ms.vars]
    lo = 0
    for e in ms.terms:
        deg = sum(e[i] for i in cidx)
        if e[hi_idx] < -deg:
            raise FockError("ħ-valuation below the coupling-letter bound")
        lo = min(lo, e[hi_idx])
    win = list(ms.windows)
    win[hi_idx] = (min(lo, win[hi_idx][0]), h_hi)
    return MSeries(ms.vars, tuple(win), ms.terms)
