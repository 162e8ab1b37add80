import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from fencekit import fence, sets
from fencekit.fixtures import CM2, EX_A, EX_B, EX_C
from fencekit.model import CostSharingScheme
from fencekit.random_schemes import random_fm_scheme

from strategies import arbitrary, cross_monotonic, fence_monotone

P = sets.from_players
A = P([1, 2, 3, 4])
L12 = P([1, 2])


def test_xi_star_examples():
    assert fence.xi_star(EX_A, 1, L12, A) == 20
    assert fence.xi_star(EX_B, 4, L12, A) == 20
    for S in range(1, 16):
        for i in sets.members(S):
            assert fence.xi_star(EX_C, i, S, S) == EX_C.xi(i, S)


@pytest.mark.parametrize("i,L,U", [(1, P([1, 2]), P([1])), (3, 0, P([1, 2])), (5, 0, P([5]))])
def test_xi_star_rejects(i, L, U):
    with pytest.raises(ValueError):
        fence.xi_star(EX_A, i, L, U)


@given(arbitrary(max_n=4))
def test_xi_star_is_an_attained_minimum(s):
    for U in range(1, 1 << s.n):
        for L in sets.submasks(U):
            for i in sets.members(U):
                m = fence.xi_star(s, i, L, U)
                vals = [s.xi(i, S) for S in sets.between(L | sets.bit(i), U)]
                assert m == min(vals)


def _anti_monotone_violations(s):
    bad = []
    for U in range(1, 1 << s.n):
        for L in sets.submasks(U):
            for U1 in sets.supersets(U, s.n):
                for L1 in sets.submasks(L):
                    for i in sets.members(U):
                        if fence.xi_star(s, i, L, U) < fence.xi_star(s, i, L1, U1):
                            bad.append((i, L, U, L1, U1))
    return bad


@pytest.mark.parametrize("s", [EX_A, EX_B, EX_C, CM2], ids=["ex_a", "ex_b", "ex_c", "cm2"])
def test_xi_star_anti_monotone_on_fixtures(s):
    assert _anti_monotone_violations(s) == []


@settings(max_examples=25)
@given(arbitrary(max_n=3))
def test_xi_star_anti_monotone_random(s):
    assert _anti_monotone_violations(s) == []


# ---- the three conditions


def test_condition_examples():
    assert not fence.check_condition_a(EX_A, L12, A)
    assert fence.check_condition_a(EX_B, L12, A)
    b = fence.check_condition_b(EX_B, L12, A)
    assert not b and b.witness["player"] == 3 and b.witness["sets"][3] is None
    b = fence.check_condition_b(EX_A, L12, A)
    assert b and b.witness["sets"] == {3: P([1, 2, 3]), 4: P([1, 2, 4])}
    c = fence.check_condition_c(EX_C, L12, A)
    assert not c and c.witness == {"C": P([3, 4]), "player": 3}


@given(arbitrary(max_n=4))
def test_conditions_hold_at_l_equals_u(s):
    for U in range(1 << s.n):
        a = fence.check_condition_a(s, U, U)
        assert a and a.witness["S"] == U
        assert fence.check_condition_b(s, U, U)
        assert fence.check_condition_c(s, U, U)


def test_condition_a_vacuous_on_empty_pair():
    assert fence.check_condition_a(EX_A, 0, 0).witness == {"S": 0}


def test_fm_report_ex_b():
    r = fence.check_fence_monotonicity(EX_B)
    assert [(v.L, v.U, v.condition, v.witness["player"]) for v in r.violations] == [(L12, A, "b", 3)]
    assert r.violations[0].describe() == "(L={1,2},U={1,2,3,4}) condition b violated for player 3"
    assert r.status(L12, A, "b") == "violated"
    assert r.status(L12, A, "a") == "satisfied"
    assert r.pairs_checked == 81


def test_fm_report_ex_c():
    r = fence.check_fence_monotonicity(EX_C)
    got = {(v.L, v.U, v.condition, v.witness["C"]) for v in r.violations}
    assert got == {(L12, A, "c", P([3, 4])), (P([1, 2, 3]), A, "c", P([3, 4]))}


def test_fm_report_ex_a_flags_condition_a_at_l12():
    # The printed table breaks more than condition a; see the acceptance suite.
    r = fence.check_fence_monotonicity(EX_A)
    assert r.status(L12, A, "a") == "violated"


def test_cm2_is_fence_monotone():
    assert fence.check_fence_monotonicity(CM2).holds


def test_parallel_matches_serial():
    assert fence.check_fence_monotonicity(EX_A, workers=2).violations == \
        fence.check_fence_monotonicity(EX_A).violations


@settings(max_examples=30, deadline=None)
@given(cross_monotonic(max_n=5))
def test_cross_monotonic_implies_fm(s):
    assert fence.check_cross_monotonicity(s)
    assert fence.check_fence_monotonicity(s).holds


# ---- harm


def test_harm_examples():
    assert fence.harms(EX_B, 3, 4, L12, A)
    assert not fence.harms(EX_B, 4, 3, L12, A)
    for j in (2, 3, 4):
        assert not fence.harms(EX_B, 1, j, L12, A)
    with pytest.raises(ValueError):
        fence.harms(EX_B, 3, 3, L12, A)


def test_harm_graph_examples():
    g = fence.harm_graph(CM2, 0, P([1, 2]))
    assert g.edges == frozenset() and g.acyclic
    assert (3, 4) in fence.harm_graph(EX_B, L12, A).edges
    assert fence.harm_graph(EX_B, A, A).edges == frozenset()


@settings(max_examples=15, deadline=None)
@given(fence_monotone(3))
def test_harm_is_a_partial_order_on_fm_schemes(s):
    for U in range(1 << s.n):
        for L in sets.submasks(U):
            g = fence.harm_graph(s, L, U)
            assert g.partial_order and g.acyclic
            assert all(i != j for i, j in g.edges)


def test_harm_graph_reports_rather_than_raises():
    # Two players harming each other is possible for arbitrary tables.
    s = CostSharingScheme.from_table(2, {(1, 2): {1: 5, 2: 5}, (1,): {1: 1}, (2,): {2: 1}})
    g = fence.harm_graph(s, 0, P([1, 2]))
    assert g.edges == {(1, 2), (2, 1)}
    assert not g.antisymmetric and not g.acyclic and not g.partial_order


# ---- cross-monotonicity and the small-coalition consequences


def test_cross_monotonicity_examples():
    assert fence.check_cross_monotonicity(CM2)
    r = fence.check_cross_monotonicity(EX_B)
    assert not r and r.witness == {"player": 4, "S": P([1, 2, 4]), "T": A}
    assert fence.check_cross_monotonicity(CostSharingScheme.from_table(1, {(1,): {1: 7}}))


def test_proposition_1_cm2_vacuous():
    assert fence.proposition_1_violations(CM2) == []


def test_proposition_1_part_a_witness():
    # xi(2,{2,3}) < xi(2,A) while xi(3,{2,3}) > xi(3,A): part a fails with i=1, j=2, k=3.
    s = CostSharingScheme.from_table(3, {
        (1, 2, 3): {1: 1, 2: 2, 3: 1},
        (1, 2): {1: 1, 2: 2}, (1, 3): {1: 1, 3: 1}, (2, 3): {2: 1, 3: 3},
        (1,): {1: 1}, (2,): {2: 2}, (3,): {3: 3},
    })
    r = fence.check_proposition_1(s)
    assert not r
    assert fence.Prop1Violation("a", 7, 1, 2, 3) in fence.proposition_1_violations(s)


def test_proposition_1_reports_equality_consequence():
    r = fence.check_proposition_1(EX_B)
    assert r.witness["equality_fails"]


@settings(max_examples=20, deadline=None)
@given(fence_monotone(3))
def test_fm_implies_proposition_1(s):
    assert fence.check_proposition_1(s)


def test_random_fm_n4_implies_proposition_1():
    rng = random.Random(7)
    for _ in range(3):
        s = random_fm_scheme(4, rng, values=(1, 2), attempts=50_000)
        if s is not None:
            assert fence.check_proposition_1(s)
