"""Polynomial-time MWNW-tie: allocate goods one at a time along exchange paths.

Each new valued good enters through a dummy agent ``d`` that holds it. Agent
``y`` can take from agent ``x`` when ``y`` values something in ``x``'s bundle;
a ``d -> ... -> i`` path therefore raises agent ``i``'s utility by one and
leaves everyone else's unchanged. Among the reachable agents, the one whose
bump gives the best outcome wins.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Allocation, Instance, Ordering, compare_outcomes, integer_exponents, utility

DUMMY = -1


@dataclass(frozen=True)
class ExchangeGraph:
    """Adjacency of the exchange graph; ``DUMMY`` is the source holding the new good."""

    n: int
    adjacency: dict[int, tuple[int, ...]]

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(x, y) for x, ys in self.adjacency.items() for y in ys}


@dataclass(frozen=True)
class Candidate:
    terminal_agent: int
    path: tuple[int, ...]
    resulting_utilities: tuple[int, ...]


def _adjacency(valued: Sequence[int], bundles: Sequence[int], bit: int) -> dict[int, tuple[int, ...]]:
    n = len(valued)
    adj = {DUMMY: tuple(i for i in range(n) if valued[i] & bit)}
    for x in range(n):
        bx = bundles[x]
        adj[x] = tuple(y for y in range(n) if y != x and bx & valued[y]) if bx else ()
    return adj


def _bfs_parents(adj: dict[int, tuple[int, ...]]) -> dict[int, int]:
    """BFS tree from the dummy, expanding neighbours in increasing index order."""
    parent = {DUMMY: DUMMY}
    queue = deque([DUMMY])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return parent


def _path_to(parent: dict[int, int], target: int) -> tuple[int, ...] | None:
    if target not in parent or target == DUMMY:
        return None
    path = [target]
    while path[-1] != DUMMY:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def _masks(inst: Instance, alloc: Allocation) -> list[int]:
    return [sum(1 << g for g in bundle) for bundle in alloc.bundles]


def build_exchange_graph(inst: Instance, partial: Allocation, good: int) -> ExchangeGraph:
    return ExchangeGraph(inst.n, _adjacency(inst.valued_masks, _masks(inst, partial), 1 << good))


def find_path(graph: ExchangeGraph, target: int) -> tuple[int, ...] | None:
    """Shortest ``DUMMY -> target`` path; ties go to lower-index agents."""
    return _path_to(_bfs_parents(graph.adjacency), target)


def candidates(inst: Instance, partial: Allocation, good: int) -> list[Candidate]:
    """One candidate per agent reachable from the dummy, in agent order."""
    graph = build_exchange_graph(inst, partial, good)
    parent = _bfs_parents(graph.adjacency)
    base = utility(inst, partial)
    out = []
    for i in range(inst.n):
        path = _path_to(parent, i)
        if path is not None:
            bumped = base[:i] + (base[i] + 1,) + base[i + 1:]
            out.append(Candidate(i, path, bumped))
    return out


def _better(i: int, j: int, utils: Sequence[int], exps: Sequence[int]) -> bool:
    """Whether bumping agent i beats bumping agent j (i < j).

    Both outcomes share every coordinate except i and j, so only the changed
    factors of the weighted product matter; the lexicographic stage always
    favours the lower index.
    """
    ui, uj = utils[i], utils[j]
    if (ui == 0) != (uj == 0):
        return ui == 0
    # (ui+1)^pi / ui^pi  vs  (uj+1)^pj / uj^pj, zero utilities contribute 1/1
    ni, di = ((ui + 1) ** exps[i], ui ** exps[i]) if ui else (1, 1)
    nj, dj = ((uj + 1) ** exps[j], uj ** exps[j]) if uj else (1, 1)
    return ni * dj >= nj * di


def _add_good(valued: Sequence[int], bundles: list[int], utils: list[int], exps: Sequence[int],
              good: int) -> int | None:
    """Allocate ``good`` in place; return the agent whose utility rose, or None."""
    bit = 1 << good
    adj = _adjacency(valued, bundles, bit)
    if not adj[DUMMY]:
        return None
    parent = _bfs_parents(adj)
    best = None
    for i in range(len(valued)):
        if i in parent and (best is None or not _better(best, i, utils, exps)):
            best = i
    path = _path_to(parent, best)
    old = list(bundles)
    bundles[path[1]] |= bit
    for giver, taker in zip(path[1:], path[2:]):
        movable = old[giver] & valued[taker]
        moved = movable & -movable  # lowest-indexed qualifying good
        bundles[giver] &= ~moved
        bundles[taker] |= moved
    utils[best] += 1
    return best


def add_one_good(inst: Instance, partial: Allocation, good: int) -> Allocation:
    """Add one good to an MWNW-tie allocation of the goods it already covers."""
    if not 0 <= good < inst.m:
        raise IndexError(f"good index {good} out of range for {inst.m} goods")
    if good in partial.allocated or good in partial.unallocated:
        raise ValueError(f"good {good} is already placed in the partial allocation")
    bundles = _masks(inst, partial)
    utils = list(utility(inst, partial))
    winner = _add_good(inst.valued_masks, bundles, utils, integer_exponents(inst.weights), good)
    pool = set(partial.unallocated)
    if winner is None:
        pool.add(good)
    return Allocation.of((_unmask(b) for b in bundles), pool)


def select_candidate(cands: Sequence[Candidate], weights: Sequence[Fraction]) -> Candidate:
    """Best candidate by full :func:`compare_outcomes`; earliest wins on Equal."""
    best = cands[0]
    for c in cands[1:]:
        if compare_outcomes(c.resulting_utilities, best.resulting_utilities, weights) is Ordering.FIRST_PREFERRED:
            best = c
    return best


def _unmask(mask: int) -> list[int]:
    out, j = [], 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def solve_masks(valued: Sequence[int], weights: Sequence[Fraction], m: int) -> tuple[list[int], list[int]]:
    """Mask-level solver: returns (bundle masks, utilities)."""
    n = len(valued)
    bundles, utils = [0] * n, [0] * n
    exps = integer_exponents(weights)
    for g in range(m):
        _add_good(valued, bundles, utils, exps, g)
    return bundles, utils


def solve_mwnw_tie(inst: Instance) -> Allocation:
    """Run the incremental algorithm over the goods in input order.

    >>> inst = Instance.from_matrix([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
    >>> utility(inst, solve_mwnw_tie(inst))
    (2, 1, 1)
    """
    bundles, _ = solve_masks(inst.valued_masks, inst.weights, inst.m)
    allocated = 0
    for b in bundles:
        allocated |= b
    unallocated = [g for g in range(inst.m) if not allocated >> g & 1]
    return Allocation.of((_unmask(b) for b in bundles), unallocated)


def solve_trace(inst: Instance) -> list[tuple[int, ...]]:
    """Utility vector after each good is processed (entry 0 is the empty allocation)."""
    n = inst.n
    bundles, utils = [0] * n, [0] * n
    exps = integer_exponents(inst.weights)
    trace = [tuple(utils)]
    for g in range(inst.m):
        _add_good(inst.valued_masks, bundles, utils, exps, g)
        trace.append(tuple(utils))
    return trace
