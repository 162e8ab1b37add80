"""Player sets as integer bit patterns.

Player ``i`` (1-based) lives in bit ``i - 1``.  A ``PlayerSet`` is a plain
``int``; the helpers below do the enumeration and conversion work.
"""
from __future__ import annotations

from typing import Iterable, Iterator

PlayerSet = int

MAX_PLAYERS = 16


def bit(i: int) -> PlayerSet:
    return 1 << (i - 1)


def full(n: int) -> PlayerSet:
    return (1 << n) - 1


def from_players(players: Iterable[int]) -> PlayerSet:
    mask = 0
    for i in players:
        if i < 1:
            raise ValueError(f"player ids start at 1, got {i}")
        mask |= bit(i)
    return mask


def members(mask: PlayerSet) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def contains(mask: PlayerSet, i: int) -> bool:
    return bool(mask & bit(i))


def is_subset(a: PlayerSet, b: PlayerSet) -> bool:
    return a & ~b == 0


def size(mask: PlayerSet) -> int:
    return mask.bit_count()


def submasks(mask: PlayerSet) -> Iterator[PlayerSet]:
    """Every subset of ``mask`` exactly once, including 0 and ``mask``."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def between(lower: PlayerSet, upper: PlayerSet) -> Iterator[PlayerSet]:
    """Every S with lower <= S <= upper (lower must be a subset of upper)."""
    for sub in submasks(upper & ~lower):
        yield lower | sub


def supersets(mask: PlayerSet, n: int) -> Iterator[PlayerSet]:
    return between(mask, full(n))


def lex_key(mask: PlayerSet) -> tuple[int, ...]:
    """Sort key: sets compared as sorted player lists."""
    return members(mask)


def fmt(mask: PlayerSet) -> str:
    return "{" + ",".join(str(i) for i in members(mask)) + "}"
