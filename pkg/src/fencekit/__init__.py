"""Verification toolkit for group-strategyproof cost-sharing mechanisms."""
from .model import (CostFunction, CostSharingScheme, MechanismOutcome, bid_vector, money,
                    utility, validate_scheme)
from .fence import check_fence_monotonicity, xi_star
from .mechanism import FencingMechanism, MoulinMechanism, find_stable_pair, run_fencing, run_moulin

__all__ = [
    "CostFunction", "CostSharingScheme", "MechanismOutcome", "bid_vector", "money", "utility",
    "validate_scheme", "check_fence_monotonicity", "xi_star", "FencingMechanism",
    "MoulinMechanism", "find_stable_pair", "run_fencing", "run_moulin",
]
