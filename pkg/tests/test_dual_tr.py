"""End-to-end duality check: the transform output equals a fresh recursion run
on the dual curve, expanded at the anchor in the w coordinate."""

import pytest

from specrec.anchor import AnchorFrame
from specrec.curve import PsiSpec, dual_curve, ramification_locus
from specrec.duality import DualityEngine
from specrec.poly import Poly
from specrec.rationals import Rat
from specrec.series import CapError
from specrec.toporec import tr_correlators
from test_curve import lambert_curve, ratmap_curve
from test_duality import build_series_table


def rq(p, q=1):
    return Rat(p) / Rat(q)


@pytest.mark.parametrize("curve_fn", [lambert_curve, ratmap_curve])
def test_transform_equals_dual_recursion(curve_fn):
    order = 5
    curve = curve_fn()
    # the zero of R(y) must avoid the poles of X: z = -2 is safe for both curves
    psi = PsiSpec(Poly.from_rats((0, 0, rq(1, 2))), Poly.from_rats((1, rq(1, 2))),
                  Poly.from_rats((1,)))
    table, frame, _ = build_series_table(curve, 3, 6)
    eng = DualityEngine(table, psi, g_max=1, n_max=3, order=order)
    dcurve = dual_curve(curve, psi)
    dram = ramification_locus(dcurve)
    dtable = tr_correlators(dcurve, dram, 1)
    dframe = AnchorFrame(dcurve, order + 2)
    for g, n in [(1, 1), (0, 3)]:
        got = eng.dual_npoint(g, n)
        want = dframe.expand_entry(dtable.w(g, n), (order,) * n)
        for exps in _grid(range(1, order), n):
            try:
                a = got.coefficient(exps)
            except CapError:
                continue
            b = want.coefficient(exps)
            assert a == b, (g, n, exps, a, b)


def _grid(rng, n):
    if n == 1:
        for k in rng:
            yield (k,)
        return
    for k in rng:
        for rest in _grid(rng, n - 1):
            yield (k,) + rest
