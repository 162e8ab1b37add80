"""Ground types: exact money, cost-sharing schemes, cost functions, bids and
mechanism outcomes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from . import sets
from .sets import PlayerSet

Money = Fraction
ZERO = Fraction(0)

BidVector = tuple  # tuple[Fraction, ...], one entry per player


class MissingCell(KeyError):
    pass


def money(value) -> Fraction:
    """Parse an exact amount from an int, Fraction or ``"p/q"`` string.

    Floats are rejected; they would silently carry binary rounding into
    comparisons that must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not amounts")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            _, den = text.split("/", 1)
            if int(den) <= 0:
                raise ValueError(f"denominator must be positive: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot read an exact amount from {value!r}")


def fmt_money(x: Fraction) -> str:
    return str(x)


def bid_vector(values: Iterable) -> BidVector:
    return tuple(money(v) for v in values)


class CostSharingScheme:
    """The payment table xi(i, S).

    ``cells`` maps ``(player, set)`` to a payment for players inside the set.
    Construction is permissive so malformed tables can still be inspected by
    :func:`validate_scheme`; lookups of absent cells raise :class:`MissingCell`.
    """

    __slots__ = ("n", "_cells", "_rows", "__weakref__")

    def __init__(self, n: int, cells: Mapping[tuple[int, PlayerSet], object]):
        if not 1 <= n <= sets.MAX_PLAYERS:
            raise ValueError(f"player count must be in 1..{sets.MAX_PLAYERS}, got {n}")
        self.n = n
        self._cells = {(int(i), int(S)): money(v) for (i, S), v in cells.items()}
        self._rows: dict[PlayerSet, tuple] = {}

    @classmethod
    def from_table(cls, n: int, table: Mapping[Iterable[int], Mapping[int, object]]):
        """Build from ``{players: {player: payment}}``, e.g. ``{(1, 2): {1: 1, 2: 1}}``."""
        cells = {}
        for players, payments in table.items():
            S = sets.from_players(players)
            for i, v in payments.items():
                cells[(int(i), S)] = v
        return cls(n, cells)

    @classmethod
    def from_function(cls, n: int, fn) -> "CostSharingScheme":
        """Build from ``fn(i, S) -> payment`` evaluated on every i in S."""
        cells = {}
        for S in range(1, 1 << n):
            for i in sets.members(S):
                cells[(i, S)] = fn(i, S)
        return cls(n, cells)

    @property
    def full(self) -> PlayerSet:
        return sets.full(self.n)

    def cells(self) -> dict[tuple[int, PlayerSet], Fraction]:
        return dict(self._cells)

    def xi(self, i: int, S: PlayerSet) -> Fraction:
        if not S & sets.bit(i):
            return ZERO
        try:
            return self._cells[(i, S)]
        except KeyError:
            raise MissingCell((i, S)) from None

    def row(self, S: PlayerSet) -> tuple:
        """Payments of players 1..n at served set S (index i - 1)."""
        r = self._rows.get(S)
        if r is None:
            r = tuple(self.xi(i, S) for i in range(1, self.n + 1))
            self._rows[S] = r
        return r

    def payments_of(self, i: int) -> list[Fraction]:
        """All table values of player i, one per set containing i."""
        return [self.xi(i, S) for S in sets.supersets(sets.bit(i), self.n)]

    def __eq__(self, other):
        if not isinstance(other, CostSharingScheme):
            return NotImplemented
        return self.n == other.n and self._cells == other._cells

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"CostSharingScheme(n={self.n}, cells={len(self._cells)})"


@dataclass(frozen=True)
class ValidationReport:
    missing: list = field(default_factory=list)    # (i, S)
    negative: list = field(default_factory=list)   # (i, S, value)
    outside: list = field(default_factory=list)    # (i, S, value): i not in S, value != 0

    @property
    def valid(self) -> bool:
        return not (self.missing or self.negative or self.outside)


def validate_scheme(s: CostSharingScheme) -> ValidationReport:
    report = ValidationReport()
    for S in range(1, 1 << s.n):
        for i in sets.members(S):
            if (i, S) not in s._cells:
                report.missing.append((i, S))
    for (i, S), v in sorted(s._cells.items(), key=lambda kv: (sets.lex_key(kv[0][1]), kv[0][0])):
        if not 1 <= i <= s.n or S <= 0 or S >= 1 << s.n:
            report.outside.append((i, S, v))
        elif not S & sets.bit(i):
            if v != 0:
                report.outside.append((i, S, v))
        elif v < 0:
            report.negative.append((i, S, v))
    return report


class CostFunction:
    __slots__ = ("n", "_cost")

    def __init__(self, n: int, cost: Mapping[PlayerSet, object]):
        self.n = n
        self._cost = {int(S): money(v) for S, v in cost.items()}
        missing = [S for S in range(1, 1 << n) if S not in self._cost]
        if missing:
            raise ValueError(f"cost function missing sets: {[sets.fmt(S) for S in missing]}")
        if any(v < 0 for v in self._cost.values()):
            raise ValueError("costs must be nonnegative")

    @classmethod
    def from_table(cls, n: int, table: Mapping[Iterable[int], object]):
        return cls(n, {sets.from_players(k): v for k, v in table.items()})

    def __call__(self, S: PlayerSet) -> Fraction:
        return self._cost[S]

    def items(self):
        return sorted(self._cost.items(), key=lambda kv: sets.lex_key(kv[0]))


@dataclass(frozen=True)
class MechanismOutcome:
    served: PlayerSet
    payments: tuple  # Fraction per player, index i - 1

    def is_served(self, i: int) -> bool:
        return bool(self.served & sets.bit(i))

    def payment(self, i: int) -> Fraction:
        return self.payments[i - 1]

    def __str__(self):
        pays = ", ".join(fmt_money(p) for p in self.payments)
        return f"served {sets.fmt(self.served)} payments ({pays})"


def outcome_from_set(s: CostSharingScheme, S: PlayerSet) -> MechanismOutcome:
    return MechanismOutcome(S, s.row(S))


def utility(v_i, outcome: MechanismOutcome, i: int) -> Fraction:
    """Quasi-linear utility v_i * a_i - p_i."""
    if not 1 <= i <= len(outcome.payments):
        raise ValueError(f"player {i} out of range")
    if outcome.is_served(i):
        return money(v_i) - outcome.payment(i)
    return -outcome.payment(i)
