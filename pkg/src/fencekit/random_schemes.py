"""Random scheme generators for property tests and search."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from . import sets
from .fence import check_fence_monotonicity
from .model import CostSharingScheme


def random_cross_monotonic(n: int, rng: random.Random, top: int = 3,
                           steps: Sequence = (0, 0, 1, 2)) -> CostSharingScheme:
    """Payments built from the grand coalition down: each cell is the largest
    payment of the same player in a one-larger set, plus a random step."""
    cells: dict = {}
    order = sorted(range(1, 1 << n), key=lambda m: -sets.size(m))
    for S in order:
        outside = [k for k in range(1, n + 1) if not S & sets.bit(k)]
        for i in sets.members(S):
            if outside:
                base = max(cells[(i, S | sets.bit(k))] for k in outside)
            else:
                base = Fraction(rng.randint(0, top))
            cells[(i, S)] = base + Fraction(rng.choice(steps))
    return CostSharingScheme(n, cells)


def random_scheme(n: int, rng: random.Random, values: Sequence) -> CostSharingScheme:
    values = [Fraction(v) for v in values]
    return CostSharingScheme.from_function(n, lambda i, S: rng.choice(values))


def random_fm_scheme(n: int, rng: random.Random, values: Sequence = (1, 2, 3),
                     attempts: int = 10_000) -> Optional[CostSharingScheme]:
    """Rejection-sample a Fence Monotone scheme; None if none turned up."""
    for _ in range(attempts):
        s = random_scheme(n, rng, values)
        if check_fence_monotonicity(s).holds:
            return s
    return None


def random_window_scheme(cost, lower_factor, rng: random.Random,
                         denominator: int = 12) -> CostSharingScheme:
    """Per set, a total drawn strictly above lower_factor * C(S) and at most
    C(S), split at random among the members (multiples of 1/denominator)."""
    lower_factor = Fraction(lower_factor)
    cells = {}
    for S in range(1, 1 << cost.n):
        c = cost(S)
        lo = int(lower_factor * c * denominator) + 1
        hi = int(c * denominator)
        total = rng.randint(lo, hi) if lo <= hi else hi
        ps = sets.members(S)
        cuts = sorted(rng.randint(0, total) for _ in range(len(ps) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        for i, units in zip(ps, parts):
            cells[(i, S)] = Fraction(units, denominator)
    return CostSharingScheme(cost.n, cells)
