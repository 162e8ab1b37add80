import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from fencekit import mechanism as mech, sets
from fencekit.fence import xi_star
from fencekit.fixtures import CM2, EX_A, EX_B
from fencekit.mechanism import StablePair
from fencekit.model import MechanismOutcome, bid_vector, outcome_from_set
from fencekit.oracle import build_grid
from fencekit.random_schemes import random_cross_monotonic

from strategies import cross_monotonic, fence_monotone

P = sets.from_players
A = P([1, 2, 3, 4])
B = lambda *xs: bid_vector(xs)


def test_maximal_upper_set_examples():
    assert mech.maximal_upper_set(CM2, B("3/2", "3/2"), 0) == P([1, 2])
    assert mech.maximal_upper_set(CM2, B("1/2", "1/2"), 0) == 0
    star = [mech.sentinel_bid(EX_B, i) for i in range(1, 5)]
    assert mech.maximal_upper_set(EX_B, star, A) == A


@pytest.mark.parametrize("b,pair", [
    (("3/2", "3/2"), StablePair(P([1, 2]), P([1, 2]))),
    (("3/2", 1), StablePair(P([1]), P([1, 2]))),
    (("1/2", "1/2"), StablePair(0, 0)),
])
def test_find_stable_pair_examples(b, pair):
    assert mech.find_stable_pair(CM2, B(*b)) == pair
    assert mech.is_stable(CM2, B(*b), pair.L, pair.U)


def test_tie_break_examples():
    assert mech.tie_break(CM2, P([1]), P([1, 2])) == P([1, 2])
    for U in range(16):
        assert mech.tie_break(EX_B, U, U) == U
    with pytest.raises(mech.NotFenceMonotone):
        mech.tie_break(EX_A, P([1, 2]), A)


@pytest.mark.parametrize("b,served,pays", [
    (("3/2", "3/2"), P([1, 2]), (1, 1)),
    (("1/2", "1/2"), 0, (0, 0)),
    (("3/2", 1), P([1, 2]), (1, 1)),
])
def test_run_fencing_examples(b, served, pays):
    out = mech.run_fencing(CM2, B(*b))
    assert out == MechanismOutcome(served, bid_vector(pays))


@pytest.mark.parametrize("b,served,pays", [
    (("3/2", "3/2"), P([1, 2]), (1, 1)),
    ((3, "1/2"), P([1]), (2, 0)),
    (("1/2", "1/2"), 0, (0, 0)),
])
def test_run_moulin_examples(b, served, pays):
    assert mech.run_moulin(CM2, B(*b)) == MechanismOutcome(served, bid_vector(pays))


def test_moulin_rejects_non_cross_monotonic():
    with pytest.raises(ValueError):
        mech.run_moulin(EX_B, B(1, 1, 1, 1))
    with pytest.raises(ValueError):
        mech.MoulinMechanism(EX_B)


def test_fencing_mechanism_refuses_non_fm():
    with pytest.raises(mech.NotFenceMonotone, match="condition b violated for player 3"):
        mech.FencingMechanism(EX_B)


@pytest.mark.parametrize("b,served,pair", [
    (("3/2", "3/2"), P([1, 2]), StablePair(P([1, 2]), P([1, 2]))),
    (("3/2", 1), P([1, 2]), StablePair(P([1]), P([1, 2]))),
    (("1/2", "1/2"), 0, StablePair(0, 0)),
])
def test_recover_examples(b, served, pair):
    assert mech.recover_stable_pair(CM2, B(*b), outcome_from_set(CM2, served)) == pair


def test_recover_rejects_inconsistent_outcome():
    with pytest.raises(mech.InconsistentOutcome):
        mech.recover_stable_pair(CM2, B("3/2", "3/2"), outcome_from_set(CM2, P([1])))


def test_sentinel_examples():
    assert mech.sentinel_bid(CM2, 1) == 3
    assert mech.sentinel_bid(EX_A, 3) == 31
    assert mech.sentinel_bid(EX_B, 3) == 41


def test_wrong_bid_count():
    with pytest.raises(ValueError):
        mech.run_fencing(CM2, B(1))


def test_non_fm_multiplicity_is_reported():
    # EX_B at b3: the pair search is exploratory and may find several or none.
    from fencekit.fixtures import named_bid_vectors
    for b in named_bid_vectors("ex_b").values():
        pairs = mech.stable_pairs(EX_B, b)
        if len(pairs) != 1:
            with pytest.raises(mech.StablePairError) as info:
                mech.find_stable_pair(EX_B, b)
            assert info.value.pairs == pairs


# ---- properties on generated schemes


def _grid_sample(s, limit, rng):
    vecs = list(build_grid(s).vectors())
    return vecs if len(vecs) <= limit else rng.sample(vecs, limit)


def _check_scheme(s, limit=400):
    rng = random.Random(0)
    star = [mech.sentinel_bid(s, i) for i in range(1, s.n + 1)]
    for b in _grid_sample(s, limit, rng):
        pairs = mech.stable_pairs(s, b)
        assert len(pairs) == 1, (s, b, pairs)
        (pair,) = pairs
        out = mech.run_fencing(s, b)
        assert mech.recover_stable_pair(s, b, out) == pair
        for i in range(1, s.n + 1):
            p = out.payment(i)
            assert p >= 0
            if out.is_served(i):
                assert p <= b[i - 1]
            else:
                assert p == 0
            if b[i - 1] >= star[i - 1]:
                assert out.is_served(i)
        _outside_deviation_is_blocked(s, b, pair)
        _no_profitable_extension(s, b, pair, out.served)


def _outside_deviation_is_blocked(s, b, pair):
    # Any affordable S leaving U, or undercutting a minimum payment, loses
    # some nonempty T of L members who could all afford S + T.
    L, U = pair.L, pair.U
    for S in range(1, 1 << s.n):
        row = s.row(S)
        if any(b[i - 1] < row[i - 1] for i in sets.members(S)):
            continue
        escapes = bool(S & ~U)
        undercuts = not escapes and any(row[i - 1] < xi_star(s, i, L, U) for i in sets.members(S))
        if not (escapes or undercuts):
            continue
        assert any(T and all(s.xi(j, S | T) < b[j - 1] for j in sets.members(T))
                   for T in sets.submasks(L & ~S)), (s, b, pair, S)


def _no_profitable_extension(s, b, pair, S):
    # No outsiders T can join the chosen outcome weakly gaining, one strictly.
    for T in sets.submasks(s.full & ~S):
        if not T:
            continue
        gains = [b[i - 1] - s.xi(i, S | T) for i in sets.members(T)]
        assert not (all(g >= 0 for g in gains) and any(g > 0 for g in gains)), (s, b, S, T)


@settings(max_examples=20, deadline=None)
@given(fence_monotone(3))
def test_fm_schemes_n3(s):
    _check_scheme(s)


@settings(max_examples=15, deadline=None)
@given(cross_monotonic(max_n=4))
def test_cross_monotonic_schemes(s):
    _check_scheme(s, limit=150)


@settings(max_examples=20, deadline=None)
@given(cross_monotonic(max_n=3))
def test_moulin_agrees_with_fencing(s):
    for b in build_grid(s).vectors():
        out = mech.run_moulin(s, b)
        assert mech.run_fencing(s, b) == out
        # The pair read off Moulin's output is the stable pair.
        L = P(i for i in sets.members(out.served) if b[i - 1] > out.payment(i))
        assert mech.find_stable_pair(s, b) == StablePair(L, out.served)


def test_tie_break_cached_per_pair():
    s = random_cross_monotonic(3, random.Random(3))
    assert mech.tie_break(s, 0, s.full) == mech.tie_break(s, 0, s.full) == s.full
