"""Budget balance of schemes against cost functions, and the three-player
family on which no Fence Monotone scheme beats a 1/x fraction of the cost."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import sets
from .fence import check_fence_monotonicity
from .model import CostFunction, CostSharingScheme, money
from .sets import PlayerSet, bit, from_players


@dataclass(frozen=True)
class SetBalance:
    S: PlayerSet
    recovered: Fraction
    cost: Fraction
    ratio: Optional[Fraction]   # None where the cost is zero
    overcharged: bool


@dataclass
class BBReport:
    rows: list = field(default_factory=list)
    alpha: Fraction = Fraction(1)
    overcharge: bool = False

    def is_balanced(self, alpha) -> bool:
        return not self.overcharge and self.alpha >= money(alpha)


def budget_balance_ratio(s: CostSharingScheme, c: CostFunction,
                         outcomes: Optional[Iterable[PlayerSet]] = None) -> BBReport:
    """Recovered payments against cost on every nonempty set, or only on the
    given outcomes (e.g. the served sets a mechanism actually reaches)."""
    if s.n != c.n:
        raise ValueError(f"scheme has {s.n} players, cost function {c.n}")
    chosen = range(1, 1 << s.n) if outcomes is None else {S for S in outcomes if S}
    report = BBReport()
    ratios = []
    for S in sorted(chosen, key=sets.lex_key):
        got = sum(s.row(S), Fraction(0))
        cost = c(S)
        ratio = got / cost if cost > 0 else None
        over = got > cost
        report.rows.append(SetBalance(S, got, cost, ratio, over))
        report.overcharge |= over
        if ratio is not None:
            ratios.append(ratio)
    report.alpha = min(ratios) if ratios else Fraction(1)
    return report


def reachable_outcomes(mechanism, grid) -> set:
    """Served sets produced by a mechanism over every grid vector."""
    return {mechanism(v).served for v in grid.vectors()}


# --------------------------------------------------------------------------
# The three-player lower-bound family


def theorem_low_cost(x) -> CostFunction:
    x = money(x)
    if x < 1:
        raise ValueError(f"family parameter must be at least 1, got {x}")
    return CostFunction.from_table(3, {
        (1,): x, (2,): x, (3,): x,
        (1, 2): 1, (1, 3): 1,
        (2, 3): x * x + x,
        (1, 2, 3): x ** 3 + x * x + x,
    })


@dataclass(frozen=True)
class Refutation:
    constraint: str   # BB-lower, BB-upper, Prop1(a), Prop1(b), Prop1(c)
    cells: dict
    detail: str


class RefuterGap(AssertionError):
    """The decision tree ran out without finding a broken constraint."""


def theorem_low_refute(s: CostSharingScheme, x) -> Refutation:
    """Name a constraint that s breaks, following the impossibility argument.

    First every set is checked against (1/x) C(S) < sum <= C(S).  If all hold,
    the argument's chain of implications pins down one instance of the
    small-coalition consequences of Fence Monotonicity that s must break.
    """
    if s.n != 3:
        raise ValueError(f"the family has 3 players, scheme has {s.n}")
    x = money(x)
    c = theorem_low_cost(x)
    xi = s.xi
    for S in sorted(range(1, 8), key=sets.lex_key):
        total = sum(s.row(S), Fraction(0))
        if not c(S) / x < total:
            return Refutation("BB-lower", {"S": S},
                              f"sum {total} at {sets.fmt(S)} is not above C/x = {c(S) / x}")
        if total > c(S):
            return Refutation("BB-upper", {"S": S},
                              f"sum {total} at {sets.fmt(S)} exceeds C = {c(S)}")

    A = 0b111
    P = from_players
    # Budget balance on {1,2} and {1,3} caps xi(2,{1,2}) and xi(3,{1,3}) at 1.
    if xi(2, A) > 1 and xi(3, A) > 1:
        # xi(2,{1,2}) < xi(2,A): player 3 leaving lowers 2's payment, so
        # xi(3,{1,3}) >= xi(3,A) is required.
        return _prop1(s, "c", A, i=3, j=2)
    p, q = (2, 3) if xi(2, A) <= 1 else (3, 2)
    pq = bit(p) | bit(q)

    if xi(p, pq) <= 1:
        # xi(p,{p,q}) < xi(p,{p}); if also xi(q,{q}) < xi(q,{p,q}) the instance
        # with i=p, j=q breaks.  Otherwise sum on {p,q} <= x + 1, i.e. BB-lower.
        if xi(q, bit(q)) < xi(q, pq):
            return _prop1(s, "b", pq, i=p, j=q)
        raise RefuterGap(f"xi({q},{{{q}}}) >= xi({q},{{{p},{q}}}) but budget balance held")

    # xi(p,{p,q}) > 1 >= xi(p,A).
    if xi(q, pq) < xi(q, A):
        return _prop1(s, "a", A, i=1, j=q, k=p)
    if xi(1, P([1, q])) < xi(1, A):
        return _prop1(s, "b", A, i=p, j=1)
    raise RefuterGap("sum on {1,2,3} is at most x^2 + x + 1 but budget balance held")


def _prop1(s, part, S, i, j, k=None) -> Refutation:
    xi = s.xi
    S_i, S_j = S & ~bit(i), S & ~bit(j)
    premise = f"xi({j},{sets.fmt(S_i)})={xi(j, S_i)} < xi({j},{sets.fmt(S)})={xi(j, S)}"
    if part == "a":
        broken = f"xi({k},{sets.fmt(S_i)})={xi(k, S_i)} > xi({k},{sets.fmt(S)})={xi(k, S)}"
    elif part == "b":
        broken = f"xi({i},{sets.fmt(S_j)})={xi(i, S_j)} > xi({i},{sets.fmt(S)})={xi(i, S)}"
    else:
        broken = f"xi({i},{sets.fmt(S_j)})={xi(i, S_j)} < xi({i},{sets.fmt(S)})={xi(i, S)}"
    assert xi(j, S_i) < xi(j, S), premise
    cells = {"S": S, "i": i, "j": j, "k": k}
    return Refutation(f"Prop1({part})", cells, f"{premise} but {broken}")


# --------------------------------------------------------------------------
# Randomised search for well-balanced Fence Monotone schemes


@dataclass(frozen=True)
class SearchResult:
    scheme: Optional[CostSharingScheme]
    alpha: Optional[Fraction]
    meets: bool
    trials: int


def _value_pool(c: CostFunction) -> list[Fraction]:
    pool = {Fraction(0)}
    for _, cost in c.items():
        for k in range(1, c.n + 1):
            pool.add(cost / k)
    return sorted(pool)


def average_share_scheme(c: CostFunction) -> CostSharingScheme:
    """xi(i, S) = min over T <= S containing i of C(T)/|T|.

    Cross-monotonic (a larger S minimises over more T) and never overcharges
    (T = S bounds every share by the average), so it is a safe starting point.
    """
    def share(i, S):
        return min(c(T) / sets.size(T) for T in sets.submasks(S) if T & bit(i))
    return CostSharingScheme.from_function(c.n, share)


def search_bb_schemes(c: CostFunction, alpha, trials: int, seed: int = 0) -> SearchResult:
    """Random and hill-climbing search over payment tables drawn from
    cost-derived breakpoints, keeping only Fence Monotone schemes that never
    overcharge.  Returns the best budget-balance factor found.

    The climb starts from :func:`average_share_scheme` (when trials > 0) and
    accepts sideways moves, so it can cross plateaus of equal alpha.
    """
    if c.n > 4:
        raise ValueError("search is limited to at most 4 players")
    alpha = money(alpha)
    rng = random.Random(seed)
    pool = _value_pool(c)
    n = c.n
    per_set = {S: [v for v in pool if v <= c(S)] for S in range(1, 1 << n)}
    keys = [(i, S) for S in range(1, 1 << n) for i in sets.members(S)]
    best: Optional[CostSharingScheme] = None
    best_alpha: Optional[Fraction] = None
    current = None
    if trials > 0:
        current = best = average_share_scheme(c)
        best_alpha = budget_balance_ratio(best, c).alpha
    for _ in range(trials):
        mutate = current is not None and rng.random() < 0.5
        if mutate:
            cells = current.cells()
            for _ in range(rng.choice((1, 1, 2, 3))):
                i, S = rng.choice(keys)
                vals = per_set[S]
                at = vals.index(cells[(i, S)]) if cells[(i, S)] in vals else 0
                cells[(i, S)] = vals[max(0, min(len(vals) - 1, at + rng.choice((-1, 1))))]
        else:
            cells = {(i, S): rng.choice(per_set[S]) for i, S in keys}
        s = CostSharingScheme(n, cells)
        report = budget_balance_ratio(s, c)
        if report.overcharge or (best_alpha is not None and report.alpha < best_alpha):
            continue
        if not mutate and best_alpha is not None and report.alpha == best_alpha:
            continue
        if not check_fence_monotonicity(s).holds:
            continue
        current = s
        if best_alpha is None or report.alpha > best_alpha:
            best, best_alpha = s, report.alpha
    return SearchResult(best, best_alpha, best_alpha is not None and best_alpha >= alpha, trials)
