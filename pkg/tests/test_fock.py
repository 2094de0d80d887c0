"""Fock-space layer: characters, Schur states, diagonal weights, currents,
connected correlators, map generating functions."""

from specrec.curve import PsiSpec
from specrec.fock import (FockState, build_z_state, character, connected_from_blocks,
                          contents, eigenvalue_series, maps_npoint, mn_point_oracle,
                          partitions_of, schur_in_powersums, schur_state, z_centralizer)
from specrec.mseries import MSeries
from specrec.poly import Poly
from specrec.rationals import Rat


def rq(p, q=1):
    return Rat(p) / Rat(q)


def psi_from(P=(), Rn=(1,), Rd=(1,)):
    return PsiSpec(Poly.from_rats(P), Poly.from_rats(Rn), Poly.from_rats(Rd))


def test_character_table_small():
    assert character((2,), (2,)) == 1
    assert character((1, 1), (1, 1)) == 1
    assert character((2, 1), (1, 1, 1)) == 2
    assert character((2, 1), (2, 1)) == 0
    assert character((2, 1), (3,)) == -1
    assert character((3, 2), (2, 2, 1)) == 1


def test_character_orthogonality():
    for n in range(1, 7):
        parts = partitions_of(n)
        for la in parts:
            for lb in parts:
                acc = Rat(0)
                for mu in parts:
                    acc += Rat(character(la, mu) * character(lb, mu), z_centralizer(mu))
                assert acc == (1 if la == lb else 0)


def test_schur_states():
    assert schur_in_powersums((1,)) == {(1,): Rat(1)}
    assert schur_in_powersums((2,)) == {(1, 1): rq(1, 2), (2,): rq(1, 2)}
    assert schur_in_powersums((1, 1)) == {(1, 1): rq(1, 2), (2,): rq(-1, 2)}
    st = schur_state((2,), 4)
    assert st.terms[(1, 1)].coeff() == rq(1, 2)


def test_ladder_commutator():
    # [J_k, J_{-k}] = k on a sample state within caps
    st = FockState(8, {(3, 1): MSeries.const(Rat(1)), (2,): MSeries.const(Rat(2))})
    for k in (1, 2, 3):
        a = st.apply_J(-k).apply_J(k)
        b = st.apply_J(k).apply_J(-k)
        for lam in set(a.terms) | set(b.terms) | set(st.terms):
            lhs = a.terms.get(lam, MSeries.const(Rat(0))) - b.terms.get(lam, MSeries.const(Rat(0)))
            want = st.terms.get(lam, MSeries.const(Rat(0))).scale(Rat(k))
            assert not (lhs - want).terms


def test_diagonal_eigenvalues():
    # P = θ^2, R = 1 on s_(1): eigenvalue e^{ħ²/12}
    psi = psi_from(P=(0, 0, 1))
    eig = eigenvalue_series(psi, (1,), 6)
    assert eig[0] == 1 and eig[2] == rq(1, 12) and eig[4] == rq(1, 288)
    # P = 0, R = 1+θ on s_(2): contents {0,1}: eigenvalue (1+ħ)
    psi2 = psi_from(Rn=(1, 1))
    eig2 = eigenvalue_series(psi2, (2,), 6)
    assert eig2[0] == 1 and eig2[1] == 1
    for k in range(2, 7):
        assert not eig2[k]
    # diagonal operator scales the whole Schur state
    st = schur_state((2,), 4)
    out = st.apply_diagonal(psi2, 4)
    h = MSeries.monomial(Rat(1), ("h",), (1,), windows=((0, 4),))
    for lam, c in st.terms.items():
        assert not (out.terms[lam] - c * (MSeries.const(Rat(1)) + h)).terms


def test_diagonal_zero_is_identity():
    st = schur_state((2, 1), 6)
    out = st.apply_diagonal(PsiSpec.zero(), 5)
    assert out.terms == st.terms


def test_diagonal_multiplicative():
    psi_a = psi_from(P=(0, 0, 1))
    psi_b = psi_from(Rn=(1, 1))
    psi_ab = psi_from(P=(0, 0, 1), Rn=(1, 1))
    st = FockState(6, {(2, 1): MSeries.const(Rat(1)), (1, 1): MSeries.const(Rat(3))})
    one = st.apply_diagonal(psi_ab, 5)
    two = st.apply_diagonal(psi_a, 5).apply_diagonal(psi_b, 5)
    for lam in one.terms:
        assert not (one.terms[lam] - two.terms[lam]).truncate("h", 5).terms


def test_eigenvalue_content_dependence():
    # transposing a partition negates contents; replacing F(θ) by F(-θ)
    # (P(-θ), R(-θ)) therefore reproduces the same eigenvalue
    psi = psi_from(P=(0, 0, 1), Rn=(1, 1))
    lam, lamt = (3, 1), (2, 1, 1)
    assert sorted(contents(lam)) == sorted(-c for c in contents(lamt))
    psi_t = psi_from(P=(0, 0, 1), Rn=(1, -1))
    a = eigenvalue_series(psi, lam, 6)
    b = eigenvalue_series(psi_t, lamt, 6)
    assert all(a[k] == b[k] for k in range(7))


def test_two_current_pairing_kernel():
    # <c1 c2>_conn with trivial core: Σ_j j X1^j X2^{-j}
    base = FockState.vacuum(6, max_part=6)

    def disc(subset):
        state = base
        names = {0: "X1", 1: "X2"}
        for i in sorted(subset, reverse=True):
            cap_left = 6 * len([j for j in subset if j < i])
            state = state.apply_current(names[i], 6, cap_left)
            state = state.energy_filter(cap_left)
        return state.vacuum_part()

    total = connected_from_blocks(disc, 2)
    for j in range(1, 7):
        assert total.coeff(X1=j, X2=-j) == j
        assert total.coeff(X1=j, X2=-j + 1) == 0 if j > 1 else True


def test_mn_oracle_round_trips_table():
    # small artificial expansion data; n=0 reproduces the inputs exactly
    cs = {(0, 1, (1,)): rq(1), (0, 1, (2,)): rq(1, 2), (0, 1, (3,)): rq(2, 3),
          (0, 2, (1, 1)): rq(1, 4), (0, 2, (2, 1)): rq(-1, 3),
          (1, 1, (1,)): rq(1, 24), (1, 1, (3,)): rq(5, 8)}

    def coeff(g, m, ks):
        return cs.get((g, m, tuple(sorted(ks, reverse=True))), Rat(0))

    chi = [(0, 1), (0, 2), (1, 1)]
    out01 = mn_point_oracle(coeff, chi, PsiSpec.zero(), 0, 1, 0, 4)
    for k in range(1, 5):
        assert out01.coeff(X1=k) == coeff(0, 1, (k,))
    out11 = mn_point_oracle(coeff, chi, PsiSpec.zero(), 1, 1, 0, 4)
    for k in range(1, 5):
        assert out11.coeff(X1=k) == coeff(1, 1, (k,))
    out02 = mn_point_oracle(coeff, chi, PsiSpec.zero(), 0, 2, 0, 3)
    for k1 in range(1, 4):
        for k2 in range(1, 4):
            want = coeff(0, 2, (k1, k2))
            # the singular pairing part sits at mixed-sign exponents only
            assert out02.coeff(X1=k1, X2=k2) == want
    for j in range(1, 4):
        assert out02.coeff(X1=j, X2=-j) == j


def test_mn_oracle_psi_zero_group_merge():
    # with ψ = 0 both current groups are identical: W(g; m, n) symmetric
    cs = {(0, 1, (1,)): rq(1), (0, 1, (2,)): rq(1, 3), (0, 2, (1, 1)): rq(1, 5)}

    def coeff(g, m, ks):
        return cs.get((g, m, tuple(sorted(ks, reverse=True))), Rat(0))

    chi = [(0, 1), (0, 2)]
    mixed = mn_point_oracle(coeff, chi, PsiSpec.zero(), 0, 1, 1, 3,
                            x_names=("A",), w_names=("B",))
    pure = mn_point_oracle(coeff, chi, PsiSpec.zero(), 0, 2, 0, 3,
                           x_names=("A", "B"))
    for k1 in range(1, 4):
        for k2 in range(1, 4):
            assert mixed.coeff(A=k1, B=k2) == pure.coeff(A=k1, B=k2)


def test_maps_ordinary_one_point_trivial_weight():
    # ψ̂1 = 0: the connected one-point function is just the direct pairing
    out = maps_npoint("ordinary", 0, 1, {1: 1, 2: 1}, {1: 1, 2: 1},
                      PsiSpec.zero(), PsiSpec.zero(), 4, 4)
    assert out.coeff(X1=1, t1=0, t2=0, s1=1, s2=0) == 1
    assert out.coeff(X1=2, t1=0, t2=0, s1=0, s2=1) == 1
    assert out.coeff(X1=2, t1=0, t2=0, s1=2, s2=0) == 0
    assert out.coeff(X1=4, t1=0, t2=0, s1=0, s2=2) == 0


def test_maps_fully_simple_psi_zero_equals_ordinary():
    psi1 = psi_from(P=(0, 0, rq(1, 2)))
    a = maps_npoint("ordinary", 0, 1, {2: 1}, {2: 1}, psi1, PsiSpec.zero(), 4, 4,
                    names=("x",))
    b = maps_npoint("fully-simple", 0, 1, {2: 1}, {2: 1}, psi1, PsiSpec.zero(), 4, 4,
                    names=("x",))
    assert not (a - b).terms


def test_maps_vanishing_with_no_couplings():
    out = maps_npoint("ordinary", 0, 1, {}, {}, PsiSpec.zero(), PsiSpec.zero(), 4, 4)
    assert not out.terms
