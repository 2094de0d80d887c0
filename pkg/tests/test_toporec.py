"""Recursion engine vs the independent series oracle, plus the definition checkers."""

import pytest

from oracle_tr import AiryOracle
from specrec.curve import PsiSpec, ramification_locus
from specrec.mseries import MSeries
from specrec.poly import Poly, X
from specrec.rationals import Rat
from specrec.ratfunc import RatFunc
from specrec.toporec import (CorrelatorTable, check_crit_residues, check_linear_loop,
                             check_projection, check_quadratic_loop, check_symmetry,
                             tr_correlators)
from test_curve import airy_curve, lambert_curve, ratmap_curve


def rq(p, q=1):
    return Rat(p) / Rat(q)


def entry_laurent(entry, hi):
    """Engine entry expanded at 0 in every slot (sum of outer products)."""
    names = tuple("x%d" % i for i in range(entry.arity))
    acc = None
    for key, c in entry.terms.items():
        piece = MSeries.const(c)
        for name, f in zip(names, key):
            if f is not None:
                piece = piece * MSeries.from_lseries(f.local_series(Rat(0), hi), name)
        acc = piece if acc is None else acc + piece
    return acc if acc is not None else MSeries.zero(names, ((0, hi),) * entry.arity)


@pytest.fixture(scope="module")
def airy_table():
    curve = airy_curve()
    ram = ramification_locus(curve)
    return tr_correlators(curve, ram, 3)


@pytest.fixture(scope="module")
def oracle():
    return AiryOracle(3)


def test_airy_one_one_closed_form(airy_table):
    # single term: W(1,1) = -1/(32 z); only pole at z = 0
    entry = airy_table.w(1, 1)
    got = entry_laurent(entry, 4)
    assert got.coeff(x0=-1) == rq(-1, 32)
    for k in range(-8, 5):
        if k != -1:
            assert got.coeff(x0=k) == 0


def test_airy_matches_oracle(airy_table, oracle):
    for (g, m), ws in sorted(oracle.tables.items()):
        entry = airy_table.w(g, m)
        got = entry_laurent(entry, 6)
        names = tuple("x%d" % i for i in range(m))
        lo = -18
        for e, c in ws.terms.items():
            if all(lo <= k <= 6 for k in e):
                assert got.coeff(**dict(zip(names, e))) == c, (g, m, e)
        for e, c in got.terms.items():
            if all(lo <= k <= 6 for k in e):
                assert ws.coeff(**dict(zip(names, e))) == c, (g, m, e)


def test_airy_three_point_symmetric(airy_table):
    entry = airy_table.w(0, 3)
    pts = [rq(3, 2), rq(5, 3), rq(7, 4)]
    v = entry.eval_all(pts)
    assert v == entry.eval_all([pts[1], pts[2], pts[0]])
    assert v == entry.eval_all([pts[2], pts[1], pts[0]])


def test_checkers_on_airy(airy_table):
    ram = airy_table.ram
    assert check_linear_loop(airy_table, ram).ok
    assert check_quadratic_loop(airy_table, ram).ok
    assert check_projection(airy_table).ok
    assert check_crit_residues(airy_table).ok
    assert check_symmetry(airy_table).ok


@pytest.fixture(scope="module")
def lambert_table():
    curve = lambert_curve()
    ram = ramification_locus(curve)
    return tr_correlators(curve, ram, 3)


def test_checkers_on_lambert(lambert_table):
    ram = lambert_table.ram
    assert check_linear_loop(lambert_table, ram).ok
    assert check_quadratic_loop(lambert_table, ram).ok
    assert check_projection(lambert_table).ok
    assert check_crit_residues(lambert_table).ok
    assert check_symmetry(lambert_table).ok


def test_checkers_on_ratmap():
    curve = ratmap_curve()
    ram = ramification_locus(curve)
    table = tr_correlators(curve, ram, 2)
    assert check_linear_loop(table, ram).ok
    assert check_quadratic_loop(table, ram).ok
    assert check_projection(table).ok
    assert check_symmetry(table).ok


def test_negative_control_corruption(lambert_table):
    import copy
    bad = CorrelatorTable(lambert_table.curve, lambert_table.ram, lambert_table.chi_max,
                          dict(lambert_table.entries))
    entry = bad.entries[(1, 1)]
    # flip one coefficient: add a spurious pole at the critical point
    from specrec.tensorsum import MRat
    spur = MRat.from_factors(rq(1, 7), [RatFunc(Poly((Rat(1),)), X - 1)])
    bad.entries[(1, 1)] = entry + spur
    assert not check_quadratic_loop(bad, bad.ram).ok
    spur2 = MRat.from_factors(rq(1, 7), [RatFunc(Poly((Rat(1),)), X - 2)])
    bad.entries[(1, 1)] = entry + spur2
    assert not check_projection(bad).ok


def test_irrational_crit_curve_small():
    # cubic critical polynomial: quotient-ring path end to end
    crit = X ** 3 + 3 * X ** 2 - 1
    from specrec.curve import SpectralCurveSpec
    curve = SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(-crit, X * (1 + X)),
                              anchor=Rat(0))
    ram = ramification_locus(curve)
    table = tr_correlators(curve, ram, 1)
    assert check_linear_loop(table, ram).ok
    assert check_quadratic_loop(table, ram).ok
    assert check_projection(table).ok
    assert check_symmetry(table).ok
