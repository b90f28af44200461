"""Comparison rules: serial dictatorship, round-robin, utilitarian, weighted leximin."""

from __future__ import annotations

from fractions import Fraction

from .core import Allocation, Instance
from .oracle import SizeGuard, utility_vectors


def serial_dictatorship(inst: Instance) -> Allocation:
    """Agent 1 takes every good she values, then agent 2 from what is left, and so on."""
    remaining = set(range(inst.m))
    bundles = []
    for row in inst.valuations:
        mine = {g for g in remaining if row[g]}
        remaining -= mine
        bundles.append(mine)
    return Allocation.of(bundles, remaining)


def round_robin(inst: Instance) -> Allocation:
    """Agents pick in order 1..n, 1..n, ... until no goods remain.

    A pick is the lowest-indexed remaining good the picker values, or the
    lowest-indexed remaining good when she values none of them. Weights are
    ignored.
    """
    remaining = list(range(inst.m))
    bundles = [[] for _ in range(inst.n)]
    turn = 0
    while remaining:
        row = inst.valuations[turn]
        pick = next((g for g in remaining if row[g]), remaining[0])
        remaining.remove(pick)
        bundles[turn].append(pick)
        turn = (turn + 1) % inst.n
    return Allocation.of(bundles)


def max_utilitarian(inst: Instance) -> Allocation:
    """Each valued good to the lowest-indexed agent who values it."""
    bundles = [[] for _ in range(inst.n)]
    pool = []
    for g in range(inst.m):
        owner = next((i for i in range(inst.n) if inst.valuations[i][g]), None)
        if owner is None:
            pool.append(g)
        else:
            bundles[owner].append(g)
    return Allocation.of(bundles, pool)


def weighted_leximin(inst: Instance, guard: SizeGuard | None = None) -> Allocation:
    """Brute-force maximiser of the ascending sorted ratios ``u_i / w_i``.

    Ties go to the lexicographically larger utility vector (the MWNW-tie
    rule's own tie-break), then to enumeration order. With equal weights this
    makes the output's utility vector match the MWNW-tie one exactly.
    """
    best_owner, best_key = None, None
    for owner, u in utility_vectors(inst, guard):
        key = (sorted(Fraction(x) / w for x, w in zip(u, inst.weights)), u)
        if best_key is None or key > best_key:
            best_owner, best_key = owner, key
    goods = sorted(inst.valued_goods)
    bundles = [[] for _ in range(inst.n)]
    for g, i in zip(goods, best_owner):
        bundles[i].append(g)
    return Allocation.of(bundles, frozenset(range(inst.m)) - inst.valued_goods)


RULES = {
    "serial-dictatorship": serial_dictatorship,
    "round-robin": round_robin,
    "utilitarian": max_utilitarian,
    "weighted-leximin": weighted_leximin,
}
