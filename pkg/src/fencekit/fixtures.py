"""Reference schemes.

EX_A, EX_B and EX_C are four-player schemes, each breaking exactly one
Fence Monotonicity condition at L={1,2}, U={1,2,3,4}.  CM2 is a small
cross-monotonic scheme used as the well-behaved baseline.
"""
from __future__ import annotations

from fractions import Fraction

from .model import CostSharingScheme, bid_vector

# Rows keyed by the served set; each row gives the payment of every member.
# In EX_A and EX_C the printed {1,4} row carries its second value in the
# player-2 column; it is read here as player 4's payment.
_EX_A = {
    (1, 2, 3, 4): {1: 30, 2: 30, 3: 30, 4: 30},
    (1, 2, 3): {1: 20, 2: 30, 3: 30},
    (1, 2, 4): {1: 30, 2: 20, 4: 30},
    (1, 3, 4): {1: 30, 3: 20, 4: 30},
    (2, 3, 4): {2: 30, 3: 30, 4: 20},
    (1, 2): {1: 30, 2: 30},
    (1, 3): {1: 20, 3: 30},
    (1, 4): {1: 30, 4: 30},
    (2, 3): {2: 30, 3: 30},
    (2, 4): {2: 20, 4: 30},
    (3, 4): {3: 30, 4: 30},
    (1,): {1: 30},
    (2,): {2: 30},
    (3,): {3: 30},
    (4,): {4: 30},
}

_EX_B = {
    (1, 2, 3, 4): {1: 30, 2: 30, 3: 30, 4: 30},
    (1, 2, 3): {1: 30, 2: 30, 3: 40},
    (1, 2, 4): {1: 30, 2: 30, 4: 20},
    (1, 3, 4): {1: 30, 3: 30, 4: 30},
    (2, 3, 4): {2: 30, 3: 30, 4: 30},
    (1, 2): {1: 30, 2: 30},
    (1, 3): {1: 30, 3: 30},
    (1, 4): {1: 30, 4: 30},
    (2, 3): {2: 30, 3: 30},
    (2, 4): {2: 30, 4: 30},
    (3, 4): {3: 30, 4: 30},
    (1,): {1: 30},
    (2,): {2: 30},
    (3,): {3: 30},
    (4,): {4: 30},
}

_EX_C = {
    (1, 2, 3, 4): {1: 30, 2: 30, 3: 30, 4: 30},
    (1, 2, 3): {1: 20, 2: 20, 3: 30},
    (1, 2, 4): {1: 30, 2: 30, 4: 30},
    (1, 3, 4): {1: 30, 3: 30, 4: 30},
    (2, 3, 4): {2: 30, 3: 30, 4: 30},
    (1, 2): {1: 20, 2: 20},
    (1, 3): {1: 20, 3: 20},
    (1, 4): {1: 30, 4: 30},
    (2, 3): {2: 20, 3: 20},
    (2, 4): {2: 30, 4: 30},
    (3, 4): {3: 20, 4: 30},
    (1,): {1: 30},
    (2,): {2: 30},
    (3,): {3: 30},
    (4,): {4: 30},
}

_CM2 = {
    (1, 2): {1: 1, 2: 1},
    (1,): {1: 2},
    (2,): {2: 2},
}

EX_A = CostSharingScheme.from_table(4, _EX_A)
EX_B = CostSharingScheme.from_table(4, _EX_B)
EX_C = CostSharingScheme.from_table(4, _EX_C)
CM2 = CostSharingScheme.from_table(2, _CM2)

ALL = {"ex_a": EX_A, "ex_b": EX_B, "ex_c": EX_C, "cm2": CM2}


def _sentinels(s: CostSharingScheme) -> list[Fraction]:
    return [1 + max(s.payments_of(i)) for i in range(1, s.n + 1)]


def named_bid_vectors(name: str) -> dict[str, tuple]:
    """The bid vectors the counterexample arguments are built from.

    ``"*"`` stands for the player's sentinel bid (one above every payment).
    """
    s = ALL[name]
    star = _sentinels(s)

    def vec(*entries):
        return bid_vector(star[k] if e == "*" else e for k, e in enumerate(entries))

    if name == "ex_a":
        return {
            "b": vec("*", "*", 30, 30),
            "b'": vec("*", "*", "*", -1),
            "b''": vec("*", "*", -1, "*"),
        }
    if name == "ex_b":
        return {
            "b3": vec("*", "*", 35, "*"),
            "b4": vec("*", "*", 30, 25),
            "b34": vec("*", "*", 35, 25),
            "b'": vec("*", "*", -1, "*"),
            "b*": vec("*", "*", "*", "*"),
        }
    if name == "ex_c":
        return {
            "b": vec(25, 25, "*", 30),
            "b'": vec("*", "*", "*", -1),
            "b''": vec(25, 25, "*", "*"),
        }
    raise KeyError(f"no named bid vectors for {name!r}")
