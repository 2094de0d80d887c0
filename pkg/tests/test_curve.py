"""Spectral curve machinery: ramification loci, deck series, duals, conditions."""

import pytest

from specrec.curve import (CurveError, PsiSpec, SpectralCurveSpec, deck_transformation,
                           dual_curve, ramification_locus, validate_conditions)
from specrec.poly import Poly, X
from specrec.rationals import Rat
from specrec.ratfunc import RatFunc


def rq(p, q=1):
    return Rat(p) / Rat(q)


def lambert_curve():
    # dlogX = 1/z - 1 (X = z e^{-z}), y = z, anchor 0
    return SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(1 - X, X), anchor=Rat(0))


def airy_curve():
    # X = z^2, y = z: dlogX = 2/z; no anchor (X has no simple zero)
    return SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(Poly((Rat(2),)), X),
                             X_explicit=RatFunc(X * X))


def ratmap_curve():
    # X = z/(1+z)^2: dlogX = (1-z)/(z(1+z)), y = z, anchor 0
    return SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(1 - X, X * (1 + X)),
                             anchor=Rat(0), X_explicit=RatFunc(X, (1 + X) ** 2))


def test_anchor_validation():
    with pytest.raises(CurveError):
        SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(Poly((Rat(2),)), X), anchor=Rat(0))
    lambert_curve()  # residue 1: fine


def test_x_explicit_consistency():
    ratmap_curve()
    with pytest.raises(CurveError):
        SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(1 - X, X),
                          X_explicit=RatFunc(X * X))


def test_ramification_airy():
    ram = ramification_locus(airy_curve())
    assert ram.crit_poly == X.monic()
    assert len(ram.components) == 1 and ram.components[0].vanishing_order == 2


def test_ramification_lambert():
    ram = ramification_locus(lambert_curve())
    assert ram.crit_poly == (X - 1).monic()
    assert ram.components[0].vanishing_order == 0


def test_ramification_ratmap():
    ram = ramification_locus(ratmap_curve())
    assert ram.crit_poly == (X - 1).monic()


def test_ramification_rejects_nonsimple():
    # dlogX = 3/z: X = z^3, triple zero
    curve = SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(Poly((Rat(3),)), X))
    with pytest.raises(CurveError):
        ramification_locus(curve)
    # repeated root of the numerator: dlogX = (1-z)^2/z
    curve2 = SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc((1 - X) * (1 - X), X))
    with pytest.raises(CurveError):
        ramification_locus(curve2)


def test_deck_airy_exact():
    curve = airy_curve()
    ram = deck_transformation(curve, ramification_locus(curve), 8)
    deck = ram.components[0].deck
    ring = ram.components[0].ring
    assert deck[1] == -ring.one
    for k in range(2, 9):
        assert not deck[k]


def test_deck_lambert_series():
    curve = lambert_curve()
    ram = deck_transformation(curve, ramification_locus(curve), 10)
    deck = ram.components[0].deck
    ring = ram.components[0].ring
    # sigma = -zeta + (2/3) zeta^2 + c3 zeta^3 + ...; solve by hand:
    # F(s) = log(1+s) - s at t=1 gives sigma = -z + 2/3 z^2 - 4/9 z^3 + ...
    assert deck[1] == -ring.one
    assert deck[2] == ring.elem(Poly((rq(2, 3),)))
    assert deck[3] == ring.elem(Poly((rq(-4, 9),)))
    # involutivity is certified internally; spot-check X-invariance here:
    # log X = log z - z; compare the two sides through order 9
    work = 9
    zero = ring.zero
    from specrec.series import LSeries
    one = LSeries(0, (ring.one,), work, zero)
    zeta = LSeries(1, (ring.one,), work, zero)
    z1 = one + zeta           # z = 1 + zeta
    zs = one + deck           # z = 1 + sigma
    lhs = (zs * z1.inverse(ring.inverse)).log(ring.inverse) - (deck - zeta)
    # log(z(sigma)/z(zeta)) - (sigma - zeta) = logX(sigma-pt) - logX(zeta-pt) = 0
    assert not any(c for _, c in lhs.items())


def test_deck_irrational_points():
    # dual-curve style cubic critical polynomial
    crit = X ** 3 + 3 * X ** 2 - 1
    curve = SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(-(crit), X * (1 + X)),
                              anchor=Rat(0))
    ram = ramification_locus(curve)
    assert ram.crit_poly == crit.monic()
    deck_transformation(curve, ram, 8)
    deck = ram.components[0].deck
    assert deck[1] == -ram.components[0].ring.one


def test_dual_curve_examples():
    # psi = 0: dual equals input
    c = lambert_curve()
    d0 = dual_curve(c, PsiSpec.zero())
    assert d0.dlogX == c.dlogX
    # psi(theta) = theta: dlogw = 1/z - 2
    psi1 = PsiSpec(Poly((Rat(0), Rat(1))), Poly((Rat(1),)), Poly((Rat(1),)))
    d1 = dual_curve(c, psi1)
    assert d1.dlogX == RatFunc(1 - 2 * X, X)
    # psi = log(1+theta), X = z^2 type: dlogw = 2/z - 1/(1+z)
    psi2 = PsiSpec(Poly(), Poly((Rat(1), Rat(1))), Poly((Rat(1),)))
    d2 = dual_curve(airy_curve(), psi2)
    assert d2.dlogX == RatFunc(Poly((Rat(2),)), X) - RatFunc(Poly((Rat(1),)), 1 + X)


def test_validate_conditions_reports():
    # X = z^2, psi = 0: dual = X, crit loci coincide: disjointness fails
    rep = validate_conditions(airy_curve(), PsiSpec.zero())
    assert rep.checks["dX_dw_zeros_disjoint"] is False
    # Lambert with psi = theta: crit of w at z=1/2, crit of X at z=1: disjoint
    psi1 = PsiSpec(Poly((Rat(0), Rat(1))), Poly((Rat(1),)), Poly((Rat(1),)))
    rep2 = validate_conditions(lambert_curve(), psi1)
    assert rep2.checks["dX_dw_zeros_disjoint"] is True
    assert rep2.checks["dw_zeros_simple"] is True
    assert rep2.checks["anchor"] is True


def test_validate_y_pole_clause():
    # y = 1/z has a pole at 0 where dlogX = 1/z - 1 has a simple pole: pass
    c = SpectralCurveSpec(y=RatFunc(Poly((Rat(1),)), X), dlogX=RatFunc(1 - X, X))
    rep = validate_conditions(c, PsiSpec.zero())
    assert rep.checks["y_pole_condition"] is True
    # y = 1/(z-1): pole at the critical point z=1 of X: X finite but ramified
    c2 = SpectralCurveSpec(y=RatFunc(Poly((Rat(1),)), X - 1), dlogX=RatFunc(1 - X, X))
    rep2 = validate_conditions(c2, PsiSpec.zero())
    assert rep2.checks["y_pole_condition"] is False


def test_psi_spec_normalization_and_shift():
    with pytest.raises(CurveError):
        PsiSpec(Poly((Rat(1),)), Poly((Rat(1),)), Poly((Rat(1),)))  # P(0) != 0
    psi = PsiSpec(Poly((Rat(0), Rat(0), rq(1, 2))), Poly((Rat(2), Rat(2))), Poly((Rat(2),)))
    assert psi.R_num[0] == psi.R_den[0]  # R(0) = 1 normalized
    sh = psi.shifted(rq(1))
    assert not sh.P[0]
    assert sh.R_num[0] == sh.R_den[0]
    # series of psi: theta^2/2 + log(1+theta)
    s = psi.psi_theta_series(4)
    assert s[1] == 1 and s[2] == 0 and s[3] == rq(1, 3) and s[4] == rq(-1, 4)


def test_dual_rejects_psi_singular_at_anchor():
    # y(O) = -1 is a pole of log(1+theta): psi(y) singular at the anchor
    c = SpectralCurveSpec(y=RatFunc(X - 1), dlogX=RatFunc(1 - X, X), anchor=Rat(0))
    psi = PsiSpec(Poly(), Poly((Rat(1), Rat(1))), Poly((Rat(1),)))
    with pytest.raises(CurveError):
        dual_curve(c, psi)
