"""Maximum weighted Nash welfare with lexicographic tie-breaking, for binary valuations."""

from .core import (
    Allocation,
    Instance,
    InstanceError,
    Ordering,
    compare_outcomes,
    is_minimally_complete,
    parse_allocation,
    parse_instance,
    restrict,
    utility,
)
from .oracle import brute_force_mwnw_tie
from .solver import add_one_good, solve_mwnw_tie

__all__ = [
    "Allocation",
    "Instance",
    "InstanceError",
    "Ordering",
    "add_one_good",
    "brute_force_mwnw_tie",
    "compare_outcomes",
    "is_minimally_complete",
    "parse_allocation",
    "parse_instance",
    "restrict",
    "solve_mwnw_tie",
    "utility",
]
