"""Exhaustive ground truth for small instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .core import Allocation, Instance, integer_exponents, outcome_key, utility

DEFAULT_MAX_SEARCH_SPACE = 10**7


class GuardExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SizeGuard:
    max_search_space: int = DEFAULT_MAX_SEARCH_SPACE

    def check(self, inst: Instance) -> int:
        size = inst.n ** len(inst.valued_goods)
        if size > self.max_search_space:
            raise GuardExceeded(
                f"{inst.n}^{len(inst.valued_goods)} = {size} allocations exceeds the guard of {self.max_search_space}"
            )
        return size


def _assignments(inst: Instance, guard: SizeGuard | None):
    (guard or SizeGuard()).check(inst)
    goods = sorted(inst.valued_goods)
    unvalued = frozenset(range(inst.m)) - inst.valued_goods
    return goods, unvalued, itertools.product(range(inst.n), repeat=len(goods))


def enumerate_allocations(inst: Instance, guard: SizeGuard | None = None) -> Iterator[Allocation]:
    """Every way to hand each valued good to one agent; unvalued goods stay in the pool.

    The first valued good's owner varies slowest.
    """
    goods, unvalued, owners = _assignments(inst, guard)
    for owner in owners:
        bundles = [[] for _ in range(inst.n)]
        for g, i in zip(goods, owner):
            bundles[i].append(g)
        yield Allocation.of(bundles, unvalued)


def utility_vectors(inst: Instance, guard: SizeGuard | None):
    goods, _, owners = _assignments(inst, guard)
    vals = inst.valuations
    columns = [[vals[i][g] for i in range(inst.n)] for g in goods]
    for owner in owners:
        u = [0] * inst.n
        for col, i in zip(columns, owner):
            u[i] += col[i]
        yield owner, tuple(u)


def brute_force_mwnw_tie(inst: Instance, guard: SizeGuard | None = None) -> tuple[Allocation, tuple[int, ...]]:
    """Best minimally complete allocation under the MWNW-tie order, first in enumeration order."""
    exps = integer_exponents(inst.weights)
    keys: dict[tuple[int, ...], tuple] = {}
    best_owner, best_u, best_key = None, None, None
    for owner, u in utility_vectors(inst, guard):
        key = keys.get(u)
        if key is None:
            key = keys[u] = outcome_key(u, exps)
        if best_key is None or key > best_key:
            best_owner, best_u, best_key = owner, u, key
    goods = sorted(inst.valued_goods)
    bundles = [[] for _ in range(inst.n)]
    for g, i in zip(goods, best_owner):
        bundles[i].append(g)
    return Allocation.of(bundles, frozenset(range(inst.m)) - inst.valued_goods), best_u


def is_pareto_optimal(inst: Instance, alloc: Allocation, guard: SizeGuard | None = None) -> bool:
    current = utility(inst, alloc)
    for _, u in utility_vectors(inst, guard):
        if all(a >= b for a, b in zip(u, current)) and u != current:
            return False
    return True


def is_ef1(inst: Instance, alloc: Allocation) -> bool:
    """Envy-freeness up to one good; weights are ignored."""
    v = inst.valuations
    for i, own in enumerate(alloc.bundles):
        mine = sum(v[i][g] for g in own)
        for j, other in enumerate(alloc.bundles):
            if i == j:
                continue
            theirs = sum(v[i][g] for g in other)
            if mine >= theirs:
                continue
            if not any(mine >= theirs - v[i][g] for g in other):
                return False
    return True
