"""Anchor-coordinate expansions: inversion series, entry expansion, pair correction."""

import pytest

from specrec.anchor import AnchorFrame
from specrec.curve import ramification_locus
from specrec.rationals import Rat
from specrec.toporec import tr_correlators
from test_curve import lambert_curve, ratmap_curve


def rq(p, q=1):
    return Rat(p) / Rat(q)


def test_lambert_inversion_series():
    frame = AnchorFrame(lambert_curve(), 8)
    # X = z e^{-z}: z(X) = Σ k^{k-1} X^k / k!  (independent closed form)
    fact = 1
    for k in range(1, 9):
        fact *= k
        assert frame.zeta_of_x[k] == rq(k ** (k - 1), fact)
    # y = z: the one-point series y(z(X)) = X + X^2 + 3/2 X^3 + 8/3 X^4 + ...
    ys = frame.y_series()
    assert [ys[k] for k in range(5)] == [0, 1, 1, rq(3, 2), rq(8, 3)]


def test_ratmap_inversion_series():
    frame = AnchorFrame(ratmap_curve(), 8)
    # X = z/(1+z)^2: z(X) = Σ binom(2k, k-1)/k ... Catalan-type; spot values
    # z = X + 2X^2 + 5X^3 + 14X^4 (shifted Catalan numbers)
    assert [frame.zeta_of_x[k] for k in range(1, 5)] == [1, 2, 5, 14]


def test_x_explicit_scale_is_respected():
    from specrec.curve import SpectralCurveSpec
    from specrec.poly import X
    from specrec.ratfunc import RatFunc
    # X = 3z/(1+z): dlogX = 1/z - 1/(1+z) = 1/(z(1+z)); X'(0) = 3
    c = SpectralCurveSpec(y=RatFunc(X), dlogX=RatFunc(1, X * (1 + X)),
                          anchor=Rat(0), X_explicit=RatFunc(3 * X, 1 + X))
    frame = AnchorFrame(c, 6)
    assert frame.x_of_zeta[1] == 3
    # z(X) = X/(3 - X) = X/3 + X^2/9 + ...
    assert frame.zeta_of_x[1] == rq(1, 3) and frame.zeta_of_x[2] == rq(1, 9)


def test_pair_correction_positive_and_symmetric():
    frame = AnchorFrame(lambert_curve(), 8)
    c = frame.pair_correction_mseries(6)
    for k1 in range(1, 6):
        for k2 in range(1, 6):
            assert c.coeff(X1=k1, X2=k2) == c.coeff(X1=k2, X2=k1)
    assert c.coeff(X1=1, X2=1) != 0
    sep = frame.pair_correction_sep(6)
    for k1 in range(1, 6):
        for k2 in range(1, 6):
            assert sep.coefficient((k1, k2)) == c.coeff(X1=k1, X2=k2)


def test_expand_entry_matches_direct_eval():
    curve = lambert_curve()
    ram = ramification_locus(curve)
    table = tr_correlators(curve, ram, 1)
    frame = AnchorFrame(curve, 8)
    sep = frame.expand_entry(table.w(1, 1))
    # compare against composing the rational entry with z(X) directly
    entry = table.w(1, 1)
    direct = None
    for key, coeff in entry.terms.items():
        s = key[0].local_series(Rat(0), 8).compose(frame.zeta_of_x) * coeff
        direct = s if direct is None else direct + s
    for k in range(1, 8):
        assert sep.coefficient((k,)) == direct[k]
    # stable entries vanish at the anchor (positive orders only)
    assert sep.coefficient((0,)) == 0
