"""Brute-force group-strategyproofness and axiom checks for black-box
mechanisms on a finite bid grid.

A coalition is successful when every liar (a player whose report differs
from the true value) keeps at least the truthful utility and some player,
liar or not, strictly gains.  Verdicts only ever speak about the grid.

Nothing here looks inside the mechanism; the only scheme-derived inputs are
the grid values and sentinel bids.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import sets
from .model import CostSharingScheme, MechanismOutcome, bid_vector, utility
from .sets import PlayerSet, members

Mechanism = Callable[[tuple], MechanismOutcome]

DEFAULT_MAX_N = 4


@dataclass(frozen=True)
class BidGrid:
    values: tuple          # per player: sorted tuple of Fractions
    epsilon: Fraction
    sentinels: tuple       # per player sentinel bid

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def size(self) -> int:
        return math.prod(len(v) for v in self.values)

    def vectors(self):
        return itertools.product(*self.values)


def _sentinels(s: CostSharingScheme) -> tuple:
    return tuple(1 + max(s.payments_of(i)) for i in range(1, s.n + 1))


def build_grid(s: CostSharingScheme) -> BidGrid:
    """Per player: -1, each payment p and p +/- eps, and the sentinel bid.

    eps is half the smallest gap between distinct payment values, capped at
    1/2, so it sits strictly inside every payment difference.
    """
    everything = sorted({v for i in range(1, s.n + 1) for v in s.payments_of(i)})
    gaps = [b - a for a, b in zip(everything, everything[1:])]
    eps = min([Fraction(1, 2)] + [g / 2 for g in gaps])
    star = _sentinels(s)
    values = []
    for i in range(1, s.n + 1):
        vals = {Fraction(-1), star[i - 1]}
        for p in set(s.payments_of(i)):
            vals.update((p - eps, p, p + eps))
        values.append(tuple(sorted(vals)))
    return BidGrid(tuple(values), eps, star)


@dataclass(frozen=True)
class CoalitionWitness:
    truth: tuple           # true values v
    misreport: tuple       # reported b'
    liars: PlayerSet       # players with v_i != b'_i
    gainers: PlayerSet     # players whose utility strictly rises
    before: tuple          # utilities at m(v)
    after: tuple           # utilities at m(b') under true values v

    @property
    def gainer(self) -> int:
        return members(self.gainers)[0]

    @property
    def coalition(self) -> PlayerSet:
        return self.liars | self.gainers

    def describe(self) -> str:
        fmt = lambda xs: "(" + ", ".join(str(x) for x in xs) + ")"
        return (f"liars {sets.fmt(self.liars)} report {fmt(self.misreport)} instead of "
                f"{fmt(self.truth)}; utilities {fmt(self.before)} -> {fmt(self.after)}; "
                f"player {self.gainer} strictly gains")


def coalition_between(v: Sequence, out_v: MechanismOutcome, b2: Sequence,
                      out_b2: MechanismOutcome) -> Optional[CoalitionWitness]:
    """Witness if reporting b2 instead of the truth v is a successful coalition."""
    n = len(v)
    before = tuple(utility(v[i - 1], out_v, i) for i in range(1, n + 1))
    after = tuple(utility(v[i - 1], out_b2, i) for i in range(1, n + 1))
    liars = sets.from_players(i for i in range(1, n + 1) if v[i - 1] != b2[i - 1])
    if any(after[i - 1] < before[i - 1] for i in members(liars)):
        return None
    gainers = sets.from_players(i for i in range(1, n + 1) if after[i - 1] > before[i - 1])
    if not gainers:
        return None
    return CoalitionWitness(tuple(v), tuple(b2), liars, gainers, before, after)


def replay(m: Mechanism, w: CoalitionWitness) -> bool:
    """Re-run the mechanism on both vectors and confirm the recorded numbers."""
    again = coalition_between(w.truth, m(w.truth), w.misreport, m(w.misreport))
    return again == w


class OutcomeTable:
    """The mechanism evaluated on every vector of a product of value lists,
    as exact integers scaled by a common denominator."""

    def __init__(self, m: Mechanism, values: Sequence[Sequence[Fraction]]):
        self.values = tuple(tuple(v) for v in values)
        self.n = n = len(values)
        self.vectors = list(itertools.product(*self.values))
        self.outcomes = [m(vec) for vec in self.vectors]
        self.sizes = [len(v) for v in self.values]
        self.strides = [math.prod(self.sizes[k + 1:]) for k in range(n)]
        self._index = [{x: k for k, x in enumerate(vals)} for vals in self.values]

        denom = 1
        for vals in self.values:
            for x in vals:
                denom = math.lcm(denom, x.denominator)
        for o in self.outcomes:
            for p in o.payments:
                denom = math.lcm(denom, Fraction(p).denominator)
        self.denom = denom
        big = max([abs(x) for vals in self.values for x in vals] +
                  [abs(Fraction(p)) for o in self.outcomes for p in o.payments] + [1])
        dtype = np.int64 if big * denom * 4 < 2 ** 62 else object

        N = len(self.vectors)
        self.idx = np.array(list(itertools.product(*[range(k) for k in self.sizes])),
                            dtype=np.int64).reshape(N, n)
        self.scaled = [np.array([int(x * denom) for x in vals], dtype=dtype) for vals in self.values]
        self.served = np.array([[o.served >> k & 1 for k in range(n)] for o in self.outcomes],
                               dtype=bool).reshape(N, n)
        self.pay = np.array([[int(Fraction(p) * denom) for p in o.payments] for o in self.outcomes],
                            dtype=dtype).reshape(N, n)
        self.bids = np.stack([self.scaled[k][self.idx[:, k]] for k in range(n)], axis=1)

        order = sorted(range(1 << n), key=lambda mk: (sets.size(mk), sets.lex_key(mk)))
        self._rank = np.empty(1 << n, dtype=np.int64)
        for r, mk in enumerate(order):
            self._rank[mk] = r
        self._bitw = (1 << np.arange(n)).astype(np.int64)

    def row_of(self, v: Sequence) -> Optional[int]:
        try:
            return sum(self._index[k][v[k]] * self.strides[k] for k in range(self.n))
        except KeyError:
            return None

    def search(self, r: int) -> Optional[CoalitionWitness]:
        """First successful misreport against truthful row r: fewest liars,
        then liar set in lexicographic order, then grid order."""
        v_idx = self.idx[r]
        val = self.bids[r]
        base = np.where(self.served[r], val, 0) - self.pay[r]
        util = np.where(self.served, val, 0) - self.pay
        liar = self.idx != v_idx
        ok = np.all(~liar | (util >= base), axis=1) & np.any(util > base, axis=1)
        hits = np.nonzero(ok)[0]
        if hits.size == 0:
            return None
        masks = liar[hits].astype(np.int64) @ self._bitw
        best = hits[np.lexsort((hits, self._rank[masks]))[0]]
        v = self.vectors[r]
        w = coalition_between(v, self.outcomes[r], self.vectors[best], self.outcomes[best])
        if w is None:  # exact recheck disagrees with the scaled arithmetic
            raise ArithmeticError("scaled utilities disagree with exact utilities")
        return w


def find_successful_coalition(m: Mechanism, grid: BidGrid, v: Sequence,
                              table: Optional[OutcomeTable] = None) -> Optional[CoalitionWitness]:
    """Search every coalition and every grid misreport against truth v."""
    v = bid_vector(v)
    if table is not None:
        r = table.row_of(v)
        if r is not None:
            return table.search(r)
    values = [sorted(set(grid.values[k]) | {v[k]}) for k in range(grid.n)]
    t = OutcomeTable(m, values)
    return t.search(t.row_of(v))


@dataclass(frozen=True)
class GSPVerdict:
    gsp_on_grid: bool
    witness: Optional[CoalitionWitness]
    truths_checked: int
    grid_size: int

    @property
    def label(self) -> str:
        if not self.gsp_on_grid:
            return "successful coalition found"
        if self.truths_checked < self.grid_size:
            return f"GSP-on-grid (sampled {self.truths_checked} of {self.grid_size} truthful vectors)"
        return "GSP-on-grid"


def verify_gsp(m: Mechanism, grid: BidGrid, max_n: int = DEFAULT_MAX_N,
               samples: Optional[int] = None, seed: int = 0,
               table: Optional[OutcomeTable] = None) -> GSPVerdict:
    """Look for a successful coalition at every (or ``samples`` random)
    truthful grid vector; misreports always range over the whole grid."""
    if grid.n > max_n:
        raise ValueError(f"{grid.n} players exceeds the cap of {max_n}; the grid has "
                         f"{grid.size} vectors and the search is quadratic in that")
    t = table or OutcomeTable(m, grid.values)
    N = len(t.vectors)
    if samples is None or samples >= N:
        rows = range(N)
    else:
        rng = np.random.default_rng(seed)
        rows = sorted(rng.choice(N, size=samples, replace=False).tolist())
    checked = 0
    for r in rows:
        checked += 1
        w = t.search(r)
        if w is not None:
            return GSPVerdict(False, w, checked, N)
    return GSPVerdict(True, None, checked, N)


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str         # "VP", "NPT" or "CS"
    bids: tuple
    player: int
    detail: str


@dataclass(frozen=True)
class AxiomVerdict:
    ok: bool
    violation: Optional[AxiomViolation] = None


def verify_vp_npt_cs(m: Mechanism, grid: BidGrid, s: Optional[CostSharingScheme] = None,
                     table: Optional[OutcomeTable] = None) -> AxiomVerdict:
    """Voluntary participation, no positive transfer and consumer sovereignty
    on every grid vector.  The sentinel comes from s when given."""
    star = _sentinels(s) if s is not None else grid.sentinels
    t = table or OutcomeTable(m, grid.values)
    for vec, o in zip(t.vectors, t.outcomes):
        for i in range(1, grid.n + 1):
            p, served = Fraction(o.payment(i)), o.is_served(i)
            if not served and p != 0:
                return AxiomVerdict(False, AxiomViolation("VP", vec, i, f"unserved player pays {p}"))
            if served and p > vec[i - 1]:
                return AxiomVerdict(False, AxiomViolation("VP", vec, i, f"pays {p} above bid {vec[i - 1]}"))
            if p < 0:
                return AxiomVerdict(False, AxiomViolation("NPT", vec, i, f"receives {-p}"))
            if vec[i - 1] >= star[i - 1] and not served:
                return AxiomVerdict(False, AxiomViolation("CS", vec, i, "not served at the sentinel bid"))
    return AxiomVerdict(True)


# --------------------------------------------------------------------------
# Case splits over a handful of named bid vectors


class TableMechanism:
    """A mechanism known only on listed bid vectors."""

    def __init__(self, n: int, replies: Mapping[tuple, MechanismOutcome]):
        self.n = n
        self.replies = {bid_vector(k): o for k, o in replies.items()}

    def __call__(self, b) -> MechanismOutcome:
        return self.replies[bid_vector(b)]


def feasible_outcomes(s: CostSharingScheme, b: Sequence) -> list[PlayerSet]:
    """Served sets a scheme-driven mechanism may pick at b under VP, NPT, CS."""
    star = _sentinels(s)
    b = bid_vector(b)
    must = sets.from_players(i for i in range(1, s.n + 1) if b[i - 1] >= star[i - 1])
    out = []
    for S in sorted(sets.supersets(must, s.n), key=sets.lex_key):
        row = s.row(S)
        if all(row[i - 1] <= b[i - 1] for i in members(S)):
            out.append(S)
    return out


@dataclass(frozen=True)
class CaseResult:
    replies: dict          # vector name -> served set
    witness: Optional[CoalitionWitness]
    truth_name: Optional[str] = None
    misreport_name: Optional[str] = None


def case_split(s: CostSharingScheme, named: Mapping[str, Sequence]) -> list[CaseResult]:
    """Try every combination of admissible replies on the named vectors and
    report, for each, the first successful coalition among them."""
    names = list(named)
    vecs = {k: bid_vector(v) for k, v in named.items()}
    options = [feasible_outcomes(s, vecs[k]) for k in names]
    results = []
    for choice in itertools.product(*options):
        replies = dict(zip(names, choice))
        outs = {k: MechanismOutcome(S, s.row(S)) for k, S in replies.items()}
        found = []
        for a, ta in enumerate(names):
            for b, tb in enumerate(names):
                if a == b:
                    continue
                w = coalition_between(vecs[ta], outs[ta], vecs[tb], outs[tb])
                if w is not None:
                    found.append(((sets.size(w.liars), sets.lex_key(w.liars), a, b), w, ta, tb))
        if found:
            _, w, ta, tb = min(found, key=lambda f: f[0])
            results.append(CaseResult(replies, w, ta, tb))
        else:
            results.append(CaseResult(replies, None))
    return results
