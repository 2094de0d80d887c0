"""Graph-sum duality transform: collapse at ψ=0, the unstable identities,
agreement with the operator-side oracle, cap stability."""

import pytest

from specrec.anchor import AnchorFrame, expansion_table
from specrec.curve import PsiSpec, dual_curve, ramification_locus
from specrec.duality import DualityEngine, SeriesTable
from specrec.fock import mn_point_oracle
from specrec.graphs import DualityGraph, enumerate_graphs
from specrec.poly import Poly
from specrec.rationals import Rat
from specrec.series import CapError, LSeries
from specrec.toporec import tr_correlators
from test_curve import lambert_curve


def rq(p, q=1):
    return Rat(p) / Rat(q)


def psi_from(P=(), Rn=(1,), Rd=(1,)):
    return PsiSpec(Poly.from_rats(P), Poly.from_rats(Rn), Poly.from_rats(Rd))


# -- graphs ----------------------------------------------------------------------

def test_enumerate_graphs_counts():
    g10 = enumerate_graphs(1, 0)
    assert len(g10) == 1 and not g10[0].edges
    g11 = enumerate_graphs(1, 1)
    assert len(g11) == 2
    loop = [g for g in g11 if g.edges]
    assert loop[0].aut_order() == 2 and loop[0].betti() == 1
    g20 = enumerate_graphs(2, 0)
    assert len(g20) == 1
    assert g20[0].edges == ((0, 1),) and g20[0].aut_order() == 1
    # n=2, betti<=1: single 2-edge; double 2-edge; one 3-edge two ways; loops
    g21 = enumerate_graphs(2, 1)
    keyed = {g.edges for g in g21}
    assert ((0, 1),) in keyed
    assert ((0, 1), (0, 1)) in keyed
    assert ((0, 0, 1),) in keyed and ((0, 1, 1),) in keyed
    assert ((0, 0), (0, 1)) in keyed and ((0, 1), (1, 1)) in keyed
    assert len(g21) == 6
    assert DualityGraph(2, ((0, 1), (0, 1))).aut_order() == 2
    assert DualityGraph(2, ((0, 0, 1),)).aut_order() == 2
    assert DualityGraph(1, ((0, 0, 0),)).aut_order() == 6


# -- shared fixtures -----------------------------------------------------------------

ORDER = 6


def build_series_table(curve, chi_max, order):
    ram = ramification_locus(curve)
    table = tr_correlators(curve, ram, chi_max)
    frame = AnchorFrame(curve, order + 2)
    sep = expansion_table(frame, table, lambda g, m: (order,) * m)
    entries = {(g, m): [(c, k) for k, c in s.terms.items()] for (g, m), s in sep.items()}
    entries[(0, 1)] = [(Rat(1), (frame.y_series().truncate(order),))]
    pair = frame.pair_correction_sep(order)
    entries[(0, 2)] = [(c, k) for k, c in pair.terms.items()]
    return SeriesTable(entries, chi_max), frame, table


@pytest.fixture(scope="module")
def lambert_data():
    return build_series_table(lambert_curve(), 3, ORDER)


def sep_coeff(sep, exps):
    try:
        return sep.coefficient(exps)
    except CapError:
        return None


# -- psi = 0 collapse -------------------------------------------------------------------

def test_psi_zero_collapse(lambert_data):
    table, frame, _ = lambert_data
    eng = DualityEngine(table, PsiSpec.zero(), g_max=1, n_max=3, order=ORDER)
    # (0,1): identity on the one-point series
    out01 = eng.dual_npoint(0, 1)
    y = frame.y_series()
    for k in range(1, ORDER + 1):
        assert sep_coeff(out01, (k,)) == y[k]
    # (1,1)
    out11 = eng.dual_npoint(1, 1)
    ref = {k: c for (c, key) in table.terms(1, 1) for k in []}
    for k in range(1, ORDER + 1):
        want = sum((c * key[0][k] for c, key in table.terms(1, 1)), Rat(0))
        assert sep_coeff(out11, (k,)) == want
    # (0,2): output minus the pairing kernel equals the correction series
    out02 = eng.dual_npoint(0, 2)
    corr = frame.pair_correction_mseries(ORDER)
    for k1 in range(1, ORDER):
        for k2 in range(1, ORDER):
            got = sep_coeff(out02, (k1, k2))
            if got is not None:
                assert got == corr.coeff(X1=k1, X2=k2), (k1, k2)
    for j in range(1, ORDER - 1):
        assert sep_coeff(out02, (j, -j)) == j
    # (0,3): identity against the expanded table entry
    out03 = eng.dual_npoint(0, 3)
    ref03 = {}
    for c, key in table.terms(0, 3):
        pass
    for k1 in range(1, 5):
        for k2 in range(1, 5):
            for k3 in range(1, 5):
                want = sum((c * key[0][k1] * key[1][k2] * key[2][k3]
                            for c, key in table.terms(0, 3)), Rat(0))
                got = sep_coeff(out03, (k1, k2, k3))
                if got is not None:
                    assert got == want, (k1, k2, k3)


# -- unstable identities with nontrivial psi ----------------------------------------------

def test_unstable_identities_linear_psi(lambert_data):
    table, frame, _ = lambert_data
    psi = psi_from(P=(0, 1))  # psi(θ) = θ
    eng = DualityEngine(table, psi, g_max=0, n_max=2, order=ORDER)
    out01 = eng.dual_npoint(0, 1)
    # W(0,1) in w equals y expressed through w: y(z(X(w)))
    y = frame.y_series().truncate(ORDER + 1)
    psi_at_y = psi.psi_theta_series(ORDER + 2).compose(y).truncate(ORDER + 1)
    w_of_x = (LSeries(1, (Rat(1),), ORDER + 1) * (-psi_at_y).exp()).truncate(ORDER + 1)
    x_of_w = w_of_x.reversion()
    want = y.compose(x_of_w)
    for k in range(1, ORDER + 1):
        assert sep_coeff(out01, (k,)) == want[k]
    # (0,2): the dual two-point correction comes from the dual curve's frame
    out02 = eng.dual_npoint(0, 2)
    dcurve = dual_curve(lambert_curve(), psi)
    dframe = AnchorFrame(dcurve, ORDER + 2)
    corr_w = dframe.pair_correction_mseries(ORDER - 1)
    for k1 in range(1, ORDER - 1):
        for k2 in range(1, ORDER - 1):
            got = sep_coeff(out02, (k1, k2))
            if got is not None:
                assert got == corr_w.coeff(X1=k1, X2=k2), (k1, k2)


def test_unstable_identities_full_psi(lambert_data):
    table, frame, _ = lambert_data
    psi = psi_from(P=(0, 0, rq(1, 2)), Rn=(1, 1))
    eng = DualityEngine(table, psi, g_max=0, n_max=2, order=ORDER)
    out02 = eng.dual_npoint(0, 2)
    dcurve = dual_curve(lambert_curve(), psi)
    dframe = AnchorFrame(dcurve, ORDER + 2)
    corr_w = dframe.pair_correction_mseries(ORDER - 1)
    for k1 in range(1, ORDER - 1):
        for k2 in range(1, ORDER - 1):
            got = sep_coeff(out02, (k1, k2))
            if got is not None:
                assert got == corr_w.coeff(X1=k1, X2=k2), (k1, k2)


# -- against the operator-side oracle ---------------------------------------------------

def fock_coeff_fn(table: SeriesTable, frame):
    pair = frame.pair_correction_mseries(ORDER)

    def coeff(g, m, ks):
        if (g, m) == (0, 2):
            if max(ks) > ORDER:
                return Rat(0)
            return pair.coeff(X1=ks[0], X2=ks[1])
        total = Rat(0)
        for c, key in table.terms(g, m):
            v = c
            for f, k in zip(key, ks):
                coeffk = (f[k] if (f.known(k) and k >= f.lo) else Rat(0)) \
                    if f is not None else (Rat(1) if k == 0 else Rat(0))
                if not coeffk:
                    v = Rat(0)
                    break
                v = v * coeffk
            total += v
        return total

    return coeff


@pytest.mark.parametrize("gn", [(0, 1), (0, 2), (1, 1)])
def test_graph_sum_matches_fock_oracle(lambert_data, gn):
    g, n = gn
    table, frame, _ = lambert_data
    psi = psi_from(P=(0, 0, rq(1, 2)), Rn=(1, 1))
    order = 5
    eng = DualityEngine(table, psi, g_max=g, n_max=n, order=order)
    out = eng.dual_npoint(g, n)
    chi = [(gg, mm) for (gg, mm) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 1), (1, 2)]
           if 2 * gg - 2 + mm <= table.chi_max]
    oracle = mn_point_oracle(fock_coeff_fn(table, frame), chi, psi, g, 0, n, order,
                             w_names=tuple("w%d" % (i + 1) for i in range(n)))
    names = tuple("w%d" % (i + 1) for i in range(n))
    compared = 0
    rng = range(-(order - 1), order + 1) if n > 1 else range(1, order + 1)
    for exps in _grid(rng, n):
        got = sep_coeff(out, exps)
        if got is None:
            continue
        want = oracle.coeff(**dict(zip(names, exps)))
        assert got == want, (exps, got, want)
        compared += 1
    assert compared >= (order - 1) ** n


def _grid(rng, n):
    if n == 1:
        for k in rng:
            yield (k,)
        return
    for k in rng:
        for rest in _grid(rng, n - 1):
            yield (k,) + rest


def test_cap_stability_smoke(lambert_data):
    table, frame, _ = lambert_data
    psi = psi_from(P=(0, 0, rq(1, 2)), Rn=(1, 1))
    base = DualityEngine(table, psi, g_max=1, n_max=1, order=5)
    wide = DualityEngine(table, psi, g_max=1, n_max=1, order=5,
                         margins={"r": 3, "k": 3, "u": 3, "sing": 4})
    a = base.dual_npoint(1, 1)
    b = wide.dual_npoint(1, 1)
    for k in range(1, 6):
        assert sep_coeff(a, (k,)) == sep_coeff(b, (k,))
