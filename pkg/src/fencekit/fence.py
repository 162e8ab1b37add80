"""Minimum payments xi*, the Fence Monotonicity conditions and related checks.

xi*_{L,U}(i) is the least payment of player i over every served set S with
L <= S <= U and i in S.  All checks are exhaustive and exact; witnesses are
chosen deterministically (smallest set as a sorted player list).
"""
from __future__ import annotations

import threading
import weakref
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from . import sets
from .model import CostSharingScheme
from .sets import PlayerSet, bit, members

CONDITIONS = ("a", "b", "c")


class XiStarCache:
    """Memoised minimum-payment tables, one tuple per (L, U).

    The tuple holds xi*_{L,U}(i) at index i - 1, or None for i outside U.
    Filled by splitting the interval [L, U] on its lowest free player, so each
    of the 3^n intervals is computed once.
    """

    def __init__(self, scheme: CostSharingScheme):
        self.scheme = scheme
        self._n = scheme.n
        self._memo: dict[int, tuple] = {}
        self._tie: dict[int, Optional[PlayerSet]] = {}
        self._lock = threading.Lock()

    def table(self, L: PlayerSet, U: PlayerSet) -> tuple:
        key = L | (U << self._n)
        got = self._memo.get(key)
        if got is not None:
            return got
        if L == U:
            row = self.scheme.row(U)
            got = tuple(row[k] if U >> k & 1 else None for k in range(self._n))
        else:
            free = U & ~L
            low = free & -free
            with_k = self.table(L | low, U)
            without_k = self.table(L, U & ~low)
            got = tuple(
                a if b is None else (b if a is None or b < a else a)
                for a, b in zip(with_k, without_k)
            )
        with self._lock:
            self._memo[key] = got
        return got

    def __call__(self, i: int, L: PlayerSet, U: PlayerSet) -> Fraction:
        return self.table(L, U)[i - 1]


_caches: "weakref.WeakKeyDictionary[CostSharingScheme, XiStarCache]" = weakref.WeakKeyDictionary()
_caches_lock = threading.Lock()


def cache_for(s: CostSharingScheme) -> XiStarCache:
    c = _caches.get(s)
    if c is None:
        with _caches_lock:
            c = _caches.get(s)
            if c is None:
                c = _caches[s] = XiStarCache(s)
    return c


def _check_pair(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> None:
    if L & ~U:
        raise ValueError(f"L={sets.fmt(L)} is not a subset of U={sets.fmt(U)}")
    if U & ~s.full:
        raise ValueError(f"U={sets.fmt(U)} has players outside 1..{s.n}")


def xi_star(s: CostSharingScheme, i: int, L: PlayerSet, U: PlayerSet) -> Fraction:
    _check_pair(s, L, U)
    if not U & bit(i):
        raise ValueError(f"player {i} is not in U={sets.fmt(U)}")
    return cache_for(s)(i, L, U)


# --------------------------------------------------------------------------
# The three conditions


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    L: PlayerSet
    U: PlayerSet
    satisfied: bool
    witness: dict

    def __bool__(self):
        return self.satisfied


def _at_minimum(row, star, players: PlayerSet) -> bool:
    for i in members(players):
        if row[i - 1] != star[i - 1]:
            return False
    return True


def _first(candidates, key=sets.lex_key) -> Optional[PlayerSet]:
    best = None
    for S in candidates:
        if best is None or key(S) < key(best):
            best = S
    return best


def _smallest(S: PlayerSet):
    return sets.size(S), sets.lex_key(S)


def check_condition_a(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> ConditionResult:
    _check_pair(s, L, U)
    star = cache_for(s).table(L, U)
    # With L empty the empty outcome qualifies vacuously.
    found = _first(S for S in sets.between(L, U) if _at_minimum(s.row(S), star, S))
    return ConditionResult("a", L, U, found is not None, {"S": found})


def _b_set(s, L, U, i, star) -> Optional[PlayerSet]:
    # Smallest qualifying set, so the witness names as few extra players as possible.
    return _first((S for S in sets.between(L | bit(i), U) if _at_minimum(s.row(S), star, S & ~L)),
                  key=_smallest)


def check_condition_b(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> ConditionResult:
    _check_pair(s, L, U)
    star = cache_for(s).table(L, U)
    found = {i: _b_set(s, L, U, i, star) for i in members(U & ~L)}
    failing = [i for i, S in found.items() if S is None]
    witness = {"sets": found, "player": failing[0] if failing else None}
    return ConditionResult("b", L, U, not failing, witness)


def offending_sets_c(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> Iterator[tuple[PlayerSet, int]]:
    """Yield (C, i) for every C strictly inside U that undercuts xi*_{L,U} for
    some i in C with no protecting T; i is the first undercut player.

    Sets C containing L never undercut (xi(i, C) >= xi* by definition), so
    no special case is needed for them.
    """
    star = cache_for(s).table(L, U)
    for C in sorted(sets.submasks(U), key=sets.lex_key):
        if C == U or C == 0:
            continue
        row = s.row(C)
        undercut = [i for i in members(C) if row[i - 1] < star[i - 1]]
        if not undercut:
            continue
        protected = any(
            T and _at_minimum(s.row(C | T), star, T) for T in sets.submasks(L & ~C)
        )
        if not protected:
            yield C, undercut[0]


def check_condition_c(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> ConditionResult:
    _check_pair(s, L, U)
    for C, i in offending_sets_c(s, L, U):
        return ConditionResult("c", L, U, False, {"C": C, "player": i})
    return ConditionResult("c", L, U, True, {"C": None, "player": None})


_CHECKS = {"a": check_condition_a, "b": check_condition_b, "c": check_condition_c}


@dataclass(frozen=True)
class Violation:
    L: PlayerSet
    U: PlayerSet
    condition: str
    witness: dict

    def describe(self) -> str:
        head = f"(L={sets.fmt(self.L)},U={sets.fmt(self.U)}) condition {self.condition} violated"
        if self.condition == "b":
            return f"{head} for player {self.witness['player']}"
        if self.condition == "c":
            return f"{head} at C={sets.fmt(self.witness['C'])}, player {self.witness['player']}"
        return head


@dataclass
class FMReport:
    n: int
    violations: list = field(default_factory=list)
    pairs_checked: int = 0

    @property
    def holds(self) -> bool:
        return not self.violations

    def status(self, L: PlayerSet, U: PlayerSet, condition: str) -> str:
        for v in self.violations:
            if (v.L, v.U, v.condition) == (L, U, condition):
                return "violated"
        return "satisfied"


def _check_upper(args) -> list:
    s, U = args
    out = []
    for L in sorted(sets.submasks(U), key=sets.lex_key):
        for cond in CONDITIONS:
            r = _CHECKS[cond](s, L, U)
            if not r.satisfied:
                out.append(Violation(L, U, cond, r.witness))
    return out


def check_fence_monotonicity(s: CostSharingScheme, workers: int = 1) -> FMReport:
    """Run conditions a, b and c on every pair L <= U <= A."""
    uppers = sorted(range(1 << s.n), key=lambda U: (sets.size(U), sets.lex_key(U)))
    report = FMReport(s.n, pairs_checked=3 ** s.n)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_check_upper, [(s, U) for U in uppers]))
    else:
        chunks = [_check_upper((s, U)) for U in uppers]
    for chunk in chunks:
        report.violations.extend(chunk)
    return report


# --------------------------------------------------------------------------
# Harm relation


def harms(s: CostSharingScheme, i: int, j: int, L: PlayerSet, U: PlayerSet) -> bool:
    """True iff forcing i into the outcome raises j's minimum payment."""
    _check_pair(s, L, U)
    if i == j:
        raise ValueError("harm is defined for distinct players only")
    if not (U & bit(i) and U & bit(j)):
        raise ValueError(f"players {i}, {j} must both be in U={sets.fmt(U)}")
    cache = cache_for(s)
    return cache(j, L, U) < cache(j, L | bit(i), U)


@dataclass(frozen=True)
class HarmGraph:
    L: PlayerSet
    U: PlayerSet
    edges: frozenset  # (i, j): i harms j
    antisymmetric: bool
    transitive: bool
    acyclic: bool

    @property
    def partial_order(self) -> bool:
        return self.antisymmetric and self.transitive and self.acyclic

    def sinks(self) -> list[int]:
        return [i for i in members(self.U & ~self.L) if not any(e[0] == i for e in self.edges)]


def _acyclic(nodes, edges) -> bool:
    succ = {v: [b for a, b in edges if a == v] for v in nodes}
    state = dict.fromkeys(nodes, 0)

    def visit(v):
        state[v] = 1
        for w in succ[v]:
            if state[w] == 1 or (state[w] == 0 and not visit(w)):
                return False
        state[v] = 2
        return True

    return all(state[v] or visit(v) for v in nodes)


def harm_graph(s: CostSharingScheme, L: PlayerSet, U: PlayerSet) -> HarmGraph:
    _check_pair(s, L, U)
    nodes = members(U & ~L)
    edges = frozenset(
        (i, j) for i in nodes for j in nodes if i != j and harms(s, i, j, L, U)
    )
    antisymmetric = not any((j, i) in edges for i, j in edges)
    transitive = all(
        (i, k) in edges for i, j in edges for j2, k in edges if j == j2 and i != k
    )
    return HarmGraph(L, U, edges, antisymmetric, transitive, _acyclic(nodes, edges))


# --------------------------------------------------------------------------
# Cross-monotonicity and the small-n consequences of Fence Monotonicity


@dataclass(frozen=True)
class CheckResult:
    satisfied: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.satisfied


def check_cross_monotonicity(s: CostSharingScheme) -> CheckResult:
    """xi(i, S) >= xi(i, T) for all S < T and i in S.

    Checking one-player extensions T = S + {k} is enough (the inequality
    chains).  Larger T are scanned first.
    """
    for T in sorted(range(1, 1 << s.n), key=lambda m: (-sets.size(m), sets.lex_key(m))):
        row_t = s.row(T)
        for k in members(T):
            S = T & ~bit(k)
            if not S:
                continue
            row_s = s.row(S)
            for i in members(S):
                if row_s[i - 1] < row_t[i - 1]:
                    return CheckResult(False, {"player": i, "S": S, "T": T})
    return CheckResult(True)


@dataclass(frozen=True)
class Prop1Violation:
    part: str  # "a", "b" or "c"
    S: PlayerSet
    i: int
    j: int
    k: Optional[int] = None


def proposition_1_violations(s: CostSharingScheme) -> list[Prop1Violation]:
    """Every failure of the three implications for distinct i, j in S with
    xi(j, S - i) < xi(j, S)."""
    out = []
    for S in sorted(range(1, 1 << s.n), key=sets.lex_key):
        ps = members(S)
        for i in ps:
            for j in ps:
                if i == j:
                    continue
                S_i = S & ~bit(i)
                S_j = S & ~bit(j)
                if not s.xi(j, S_i) < s.xi(j, S):
                    continue
                for k in ps:
                    if k not in (i, j) and s.xi(k, S_i) > s.xi(k, S):
                        out.append(Prop1Violation("a", S, i, j, k))
                if s.xi(i, S_j) > s.xi(i, S):
                    out.append(Prop1Violation("b", S, i, j))
                if s.xi(i, S_j) < s.xi(i, S):
                    out.append(Prop1Violation("c", S, i, j))
    return out


def check_proposition_1(s: CostSharingScheme) -> CheckResult:
    """First failure, if any.  Parts b and c together say xi(i, S - j) must
    equal xi(i, S) whenever the premise holds; the witness records whether
    that equality fails."""
    found = proposition_1_violations(s)
    if not found:
        return CheckResult(True)
    v = found[0]
    witness = {"part": v.part, "S": v.S, "i": v.i, "j": v.j, "k": v.k,
               "equality_fails": v.part in ("b", "c")}
    return CheckResult(False, witness)
