"""Stable pairs, tie-breaking and the Fencing and Moulin mechanisms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import sets
from .fence import cache_for, check_cross_monotonicity, check_fence_monotonicity
from .model import CostSharingScheme, MechanismOutcome, bid_vector, outcome_from_set
from .sets import PlayerSet, bit, members


class NotFenceMonotone(ValueError):
    pass


class StablePairError(RuntimeError):
    """Zero or several stable pairs where exactly one was expected."""

    def __init__(self, message, pairs):
        super().__init__(message)
        self.pairs = pairs


class InconsistentOutcome(ValueError):
    pass


@dataclass(frozen=True)
class StablePair:
    L: PlayerSet
    U: PlayerSet

    def __str__(self):
        return f"L={sets.fmt(self.L)} U={sets.fmt(self.U)}"


def _bids(s: CostSharingScheme, b) -> tuple:
    b = bid_vector(b)
    if len(b) != s.n:
        raise ValueError(f"expected {s.n} bids, got {len(b)}")
    return b


def sentinel_bid(s: CostSharingScheme, i: int) -> Fraction:
    """One above every payment player i can be charged."""
    return 1 + max(s.payments_of(i))


def maximal_upper_set(s: CostSharingScheme, b: Sequence, L: PlayerSet) -> PlayerSet:
    """Largest U >= L with b_i >= xi*_{L,U}(i) for every i in U - L.

    Starts from the full set and drops every player bidding below their
    current minimum payment until nothing changes.
    """
    b = _bids(s, b)
    table = cache_for(s).table
    U = s.full
    while True:
        star = table(L, U)
        keep = L
        for i in members(U & ~L):
            if b[i - 1] >= star[i - 1]:
                keep |= bit(i)
        if keep == U:
            return U
        U = keep


def _meets_1_and_2(s, b, L, U) -> bool:
    star = cache_for(s).table(L, U)
    for i in members(U):
        if U & ~L & bit(i):
            if b[i - 1] != star[i - 1]:
                return False
        elif not b[i - 1] > star[i - 1]:
            return False
    return True


def is_stable(s: CostSharingScheme, b: Sequence, L: PlayerSet, U: PlayerSet) -> bool:
    """All three stability conditions, the third by enumerating every
    nonempty R outside U."""
    b = _bids(s, b)
    if L & ~U or not _meets_1_and_2(s, b, L, U):
        return False
    table = cache_for(s).table
    for R in sets.submasks(s.full & ~U):
        if R == 0:
            continue
        star = table(L, U | R)
        if all(b[i - 1] >= star[i - 1] for i in members(R)):
            return False
    return True


def _lower_candidates(s: CostSharingScheme, b) -> PlayerSet:
    # A member of L must outbid at least its cheapest payment anywhere.
    cand = 0
    for i in range(1, s.n + 1):
        if b[i - 1] > min(s.payments_of(i)):
            cand |= bit(i)
    return cand


def stable_pairs(s: CostSharingScheme, b: Sequence) -> list[StablePair]:
    """Every pair passing the stability test at b.

    U is always the maximal upper set of L: any stable U has the
    maximal-set property, and a strictly smaller one would leave a set R
    that breaks condition 3.
    """
    b = _bids(s, b)
    found = []
    for L in sorted(sets.submasks(_lower_candidates(s, b)), key=sets.lex_key):
        U = maximal_upper_set(s, b, L)
        if _meets_1_and_2(s, b, L, U):
            found.append(StablePair(L, U))
    return found


def find_stable_pair(s: CostSharingScheme, b: Sequence) -> StablePair:
    pairs = stable_pairs(s, b)
    if len(pairs) != 1:
        shown = ", ".join(str(p) for p in pairs) or "none"
        raise StablePairError(
            f"expected exactly one stable pair at b={[str(x) for x in _bids(s, b)]}, "
            f"found {len(pairs)}: {shown}", pairs)
    return pairs[0]


def tie_break(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> PlayerSet:
    """Largest S in [L, U] charging every member its minimum payment
    (ties go to the lexicographically smallest)."""
    cache = cache_for(s)
    key = L | (U << s.n)
    if key in cache._tie:
        S = cache._tie[key]
    else:
        star = cache.table(L, U)
        S = None
        for cand in sets.between(L, U):
            row = s.row(cand)
            if all(row[i - 1] == star[i - 1] for i in members(cand)):
                if S is None or (-sets.size(cand), sets.lex_key(cand)) < (-sets.size(S), sets.lex_key(S)):
                    S = cand
        cache._tie[key] = S
    if S is None:
        raise NotFenceMonotone(
            f"no outcome between L={sets.fmt(L)} and U={sets.fmt(U)} charges every "
            "member its minimum payment (condition a fails)")
    return S


def run_fencing(s: CostSharingScheme, b: Sequence) -> MechanismOutcome:
    """Fencing mechanism with the (L, U)-only tie-break above.  Assumes s is
    Fence Monotone; use :class:`FencingMechanism` to have that verified."""
    pair = find_stable_pair(s, b)
    return outcome_from_set(s, tie_break(s, pair.L, pair.U))


def run_moulin(s: CostSharingScheme, b: Sequence) -> MechanismOutcome:
    if not check_cross_monotonicity(s):
        raise ValueError("Moulin mechanism needs a cross-monotonic scheme")
    return _moulin(s, _bids(s, b))


def _moulin(s, b) -> MechanismOutcome:
    S = s.full
    while True:
        row = s.row(S)
        keep = 0
        for i in members(S):
            if b[i - 1] >= row[i - 1]:
                keep |= bit(i)
        if keep == S:
            return outcome_from_set(s, S)
        S = keep


def recover_stable_pair(s: CostSharingScheme, b: Sequence, outcome: MechanismOutcome) -> StablePair:
    """Stable pair from a known outcome: L is the strictly-positive-utility
    part of the served set, U its maximal upper set."""
    b = _bids(s, b)
    S = outcome.served
    L = 0
    for i in members(S):
        if b[i - 1] > s.xi(i, S):
            L |= bit(i)
    U = maximal_upper_set(s, b, L)
    if not is_stable(s, b, L, U):
        raise InconsistentOutcome(
            f"outcome {outcome} does not come from a group-strategyproof mechanism "
            f"at these bids: recovered L={sets.fmt(L)}, U={sets.fmt(U)} is not stable")
    return StablePair(L, U)


class FencingMechanism:
    """Callable mechanism bids -> outcome for a scheme verified once up front."""

    def __init__(self, s: CostSharingScheme, verify: bool = True):
        if verify:
            report = check_fence_monotonicity(s)
            if not report.holds:
                raise NotFenceMonotone(report.violations[0].describe())
        self.scheme = s
        self.n = s.n

    def __call__(self, b) -> MechanismOutcome:
        return run_fencing(self.scheme, b)

    def stable_pair(self, b) -> StablePair:
        return find_stable_pair(self.scheme, b)


class MoulinMechanism:
    def __init__(self, s: CostSharingScheme):
        if not check_cross_monotonicity(s):
            raise ValueError("Moulin mechanism needs a cross-monotonic scheme")
        self.scheme = s
        self.n = s.n

    def __call__(self, b) -> MechanismOutcome:
        return _moulin(self.scheme, _bids(self.scheme, b))
