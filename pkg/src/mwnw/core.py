"""Instances, allocations and the exact MWNW-tie outcome ordering.

Weights are :class:`fractions.Fraction` values. Weighted Nash products are
never evaluated as floats: both products are raised to the common
denominator of the weights, turning every exponent into a positive integer,
and compared as big integers.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence


class InstanceError(ValueError):
    """Raised for malformed instance or allocation input."""


_WEIGHT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_weight(text) -> Fraction:
    """Parse ``"3"`` or ``"3/2"`` (ints are accepted too) into a positive Fraction."""
    if isinstance(text, bool):
        raise InstanceError(f"invalid weight {text!r}")
    if isinstance(text, int):
        value = Fraction(text)
    elif isinstance(text, str):
        match = _WEIGHT_RE.match(text)
        if not match:
            raise InstanceError(f"invalid weight {text!r}: expected an integer or 'p/q'")
        num, den = match.groups()
        den = int(den) if den is not None else 1
        if den < 1:
            raise InstanceError(f"invalid weight {text!r}: denominator must be >= 1")
        value = Fraction(int(num), den)
    else:
        raise InstanceError(f"invalid weight {text!r}: expected a string")
    if value <= 0:
        raise InstanceError(f"non-positive weight {text!r}")
    return value


def format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


@dataclass(frozen=True)
class Instance:
    """Agents with positive rational weights and a 0/1 valuation matrix."""

    agent_names: tuple[str, ...]
    good_names: tuple[str, ...]
    weights: tuple[Fraction, ...]
    valuations: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, m = len(self.agent_names), len(self.good_names)
        if n < 1:
            raise InstanceError("an instance needs at least one agent")
        if len(self.weights) != n:
            raise InstanceError(f"dimension mismatch: {len(self.weights)} weights for {n} agents")
        if len(self.valuations) != n:
            raise InstanceError(f"dimension mismatch: {len(self.valuations)} valuation rows for {n} agents")
        for i, w in enumerate(self.weights):
            if not isinstance(w, Fraction) or w <= 0:
                raise InstanceError(f"non-positive weight {w!r} for agent {i} ({self.agent_names[i]})")
        for i, row in enumerate(self.valuations):
            if len(row) != m:
                raise InstanceError(
                    f"dimension mismatch: valuation row {i} ({self.agent_names[i]}) has {len(row)} entries, expected {m}"
                )
            for j, v in enumerate(row):
                if v not in (0, 1):
                    raise InstanceError(
                        f"non-binary valuation {v!r} at row {i} ({self.agent_names[i]}), column {j} ({self.good_names[j]})"
                    )
        if len(set(self.agent_names)) != n:
            raise InstanceError("duplicate agent names")
        if len(set(self.good_names)) != m:
            raise InstanceError("duplicate good names")

    @classmethod
    def from_matrix(cls, valuations: Sequence[Sequence[int]], weights: Iterable | None = None,
                    n_goods: int | None = None) -> Instance:
        """Build an instance with default names ``a1..an`` / ``g1..gm``.

        ``n_goods`` is only needed for zero goods with no rows to infer it from.
        """
        rows = tuple(tuple(int(v) for v in row) for row in valuations)
        n = len(rows)
        m = n_goods if n_goods is not None else (len(rows[0]) if rows else 0)
        if weights is None:
            ws = tuple(Fraction(1) for _ in range(n))
        else:
            ws = tuple(w if isinstance(w, Fraction) else parse_weight(w if isinstance(w, (int, str)) else str(w))
                       for w in weights)
        return cls(
            agent_names=tuple(f"a{i + 1}" for i in range(n)),
            good_names=tuple(f"g{j + 1}" for j in range(m)),
            weights=ws,
            valuations=rows,
        )

    @property
    def n(self) -> int:
        return len(self.agent_names)

    @property
    def m(self) -> int:
        return len(self.good_names)

    @cached_property
    def valued_masks(self) -> tuple[int, ...]:
        """Per agent, the bitmask of goods she values (bit j = good j)."""
        return tuple(sum(1 << j for j, v in enumerate(row) if v) for row in self.valuations)

    @cached_property
    def valued_goods(self) -> frozenset[int]:
        """Goods valued by at least one agent."""
        return frozenset(_bits(reduce(int.__or__, self.valued_masks, 0)))

    def values(self, agent: int, good: int) -> bool:
        return self.valuations[agent][good] == 1

    def with_good(self, column: Sequence[int], name: str | None = None) -> Instance:
        if len(column) != self.n:
            raise InstanceError(f"dimension mismatch: new good column has {len(column)} entries, expected {self.n}")
        name = name or _fresh_name("g", self.good_names)
        return Instance(
            self.agent_names,
            self.good_names + (name,),
            self.weights,
            tuple(row + (int(column[i]),) for i, row in enumerate(self.valuations)),
        )

    def with_agent(self, row: Sequence[int], weight: Fraction, name: str | None = None) -> Instance:
        if len(row) != self.m:
            raise InstanceError(f"dimension mismatch: new agent row has {len(row)} entries, expected {self.m}")
        if weight <= 0:
            raise InstanceError(f"non-positive weight {weight!r}")
        name = name or _fresh_name("a", self.agent_names)
        return Instance(
            self.agent_names + (name,),
            self.good_names,
            self.weights + (Fraction(weight),),
            self.valuations + (tuple(int(v) for v in row),),
        )

    def with_valuations(self, valuations: Sequence[Sequence[int]]) -> Instance:
        return Instance(self.agent_names, self.good_names, self.weights,
                        tuple(tuple(int(v) for v in row) for row in valuations))

    def sub_instance(self, agents: Sequence[int], goods: Sequence[int]) -> Instance:
        """Instance on the given agents and goods, both kept in their original order."""
        agents, goods = sorted(agents), sorted(goods)
        return Instance(
            tuple(self.agent_names[i] for i in agents),
            tuple(self.good_names[j] for j in goods),
            tuple(self.weights[i] for i in agents),
            tuple(tuple(self.valuations[i][j] for j in goods) for i in agents),
        )

    def to_json(self) -> dict:
        return {
            "agents": [{"name": a, "weight": format_weight(w)} for a, w in zip(self.agent_names, self.weights)],
            "goods": list(self.good_names),
            "valuations": [list(row) for row in self.valuations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _fresh_name(prefix: str, taken: Sequence[str]) -> str:
    k = len(taken) + 1
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def _bits(mask: int) -> Iterable[int]:
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


def parse_instance(text: str) -> Instance:
    """Parse the instance JSON format.

    >>> inst = parse_instance('{"agents":[{"name":"a","weight":"3/2"}],"goods":["g"],"valuations":[[1]]}')
    >>> inst.weights
    (Fraction(3, 2),)
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceError("malformed instance: top-level value must be an object")
    for key in ("agents", "goods", "valuations"):
        if key not in data:
            raise InstanceError(f"malformed instance: missing key {key!r}")
    agents, goods, vals = data["agents"], data["goods"], data["valuations"]
    if not isinstance(agents, list) or not isinstance(goods, list) or not isinstance(vals, list):
        raise InstanceError("malformed instance: 'agents', 'goods' and 'valuations' must be arrays")
    names, weights = [], []
    for i, agent in enumerate(agents):
        if not isinstance(agent, dict) or "name" not in agent or "weight" not in agent:
            raise InstanceError(f"malformed agent entry at row {i}: expected {{'name', 'weight'}}")
        if not isinstance(agent["name"], str):
            raise InstanceError(f"malformed agent name at row {i}")
        names.append(agent["name"])
        try:
            weights.append(parse_weight(agent["weight"]))
        except InstanceError as exc:
            raise InstanceError(f"agent row {i} ({agent['name']}): {exc}") from None
    if not all(isinstance(g, str) for g in goods):
        raise InstanceError("malformed instance: good names must be strings")
    if len(vals) != len(names):
        raise InstanceError(f"dimension mismatch: {len(vals)} valuation rows for {len(names)} agents")
    rows = []
    for i, row in enumerate(vals):
        if not isinstance(row, list):
            raise InstanceError(f"valuation row {i} is not an array")
        if len(row) != len(goods):
            raise InstanceError(
                f"dimension mismatch: valuation row {i} has {len(row)} entries, expected {len(goods)}"
            )
        for j, v in enumerate(row):
            if isinstance(v, bool) or v not in (0, 1):
                raise InstanceError(f"non-binary valuation {v!r} at row {i}, column {j} ({goods[j]})")
        rows.append(tuple(int(v) for v in row))
    return Instance(tuple(names), tuple(goods), tuple(weights), tuple(rows))


@dataclass(frozen=True)
class Allocation:
    """Disjoint bundles of good indices plus the explicit unallocated pool."""

    bundles: tuple[frozenset[int], ...]
    unallocated: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        seen = set(self.unallocated)
        for i, bundle in enumerate(self.bundles):
            if seen & bundle:
                raise InstanceError(f"bundle of agent {i} overlaps another bundle or the unallocated pool")
            seen |= bundle

    @classmethod
    def of(cls, bundles: Iterable[Iterable[int]], unallocated: Iterable[int] = ()) -> Allocation:
        return cls(tuple(frozenset(b) for b in bundles), frozenset(unallocated))

    @classmethod
    def empty(cls, n: int, goods: Iterable[int] = ()) -> Allocation:
        return cls(tuple(frozenset() for _ in range(n)), frozenset(goods))

    @property
    def allocated(self) -> frozenset[int]:
        return frozenset().union(*self.bundles)

    def owner(self, good: int) -> int | None:
        for i, bundle in enumerate(self.bundles):
            if good in bundle:
                return i
        return None

    def to_json(self, inst: Instance) -> dict:
        names = inst.good_names
        return {
            "bundles": [[names[g] for g in sorted(b)] for b in self.bundles],
            "unallocated": [names[g] for g in sorted(self.unallocated)],
        }


def parse_allocation(text: str, inst: Instance) -> Allocation:
    """Parse the allocation JSON format; goods are referenced by name."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "bundles" not in data:
        raise InstanceError("malformed allocation: expected an object with 'bundles'")
    index = {g: j for j, g in enumerate(inst.good_names)}

    def lookup(name):
        if name not in index:
            raise InstanceError(f"unknown good {name!r}")
        return index[name]

    if len(data["bundles"]) != inst.n:
        raise InstanceError(f"dimension mismatch: {len(data['bundles'])} bundles for {inst.n} agents")
    bundles = [[lookup(g) for g in b] for b in data["bundles"]]
    unallocated = [lookup(g) for g in data.get("unallocated", [])]
    return Allocation.of(bundles, unallocated)


def _check_allocation(inst: Instance, alloc: Allocation) -> None:
    if len(alloc.bundles) != inst.n:
        raise InstanceError(f"allocation has {len(alloc.bundles)} bundles for {inst.n} agents")
    for bundle in (*alloc.bundles, alloc.unallocated):
        for g in bundle:
            if not 0 <= g < inst.m:
                raise InstanceError(f"good index {g} out of range for {inst.m} goods")


def utility(inst: Instance, alloc: Allocation) -> tuple[int, ...]:
    """Utility vector: how many goods in her own bundle each agent values."""
    _check_allocation(inst, alloc)
    return tuple(sum(inst.valuations[i][g] for g in bundle) for i, bundle in enumerate(alloc.bundles))


def is_minimally_complete(inst: Instance, alloc: Allocation) -> bool:
    return alloc.allocated == inst.valued_goods


class Ordering(enum.Enum):
    FIRST_PREFERRED = 1
    EQUAL = 0
    SECOND_PREFERRED = -1


def integer_exponents(weights: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale weights by the lcm of their denominators into positive integers."""
    lcm = reduce(math.lcm, (Fraction(w).denominator for w in weights), 1)
    return tuple(int(Fraction(w) * lcm) for w in weights)


def nash_power(u: Sequence[int], exponents: Sequence[int]) -> int:
    """prod over positive u_i of u_i ** exponent_i (1 for no positive entry)."""
    product = 1
    for ui, p in zip(u, exponents):
        if ui > 0:
            product *= ui**p
    return product


def compare_outcomes(u: Sequence[int], u2: Sequence[int], weights: Sequence[Fraction]) -> Ordering:
    """Rank two utility vectors under the MWNW-tie preference.

    Positive-utility count first, then the weighted product of positive
    utilities (compared exactly), then lexicographically.

    >>> compare_outcomes((2, 1, 1), (1, 1, 2), [1, 1, 1])
    <Ordering.FIRST_PREFERRED: 1>
    >>> compare_outcomes((3, 1), (2, 2), [Fraction(1, 2), 1])
    <Ordering.SECOND_PREFERRED: -1>
    """
    if not len(u) == len(u2) == len(weights):
        raise ValueError(f"length mismatch: {len(u)}, {len(u2)}, {len(weights)} weights")
    c1 = sum(1 for x in u if x > 0)
    c2 = sum(1 for x in u2 if x > 0)
    if c1 != c2:
        return Ordering.FIRST_PREFERRED if c1 > c2 else Ordering.SECOND_PREFERRED
    exps = integer_exponents(weights)
    p1, p2 = nash_power(u, exps), nash_power(u2, exps)
    if p1 != p2:
        return Ordering.FIRST_PREFERRED if p1 > p2 else Ordering.SECOND_PREFERRED
    for a, b in zip(u, u2):
        if a != b:
            return Ordering.FIRST_PREFERRED if a > b else Ordering.SECOND_PREFERRED
    return Ordering.EQUAL


def outcome_key(u: Sequence[int], exponents: Sequence[int]) -> tuple:
    """Sort key whose order matches :func:`compare_outcomes` for fixed weights.

    ``exponents`` must come from :func:`integer_exponents`.
    """
    return (sum(1 for x in u if x > 0), nash_power(u, exponents), tuple(u))


def restrict(alloc: Allocation, agents: Iterable[int]) -> Allocation:
    """Keep the bundles of ``agents`` (original order); everything else goes to the pool."""
    keep = sorted(set(agents))
    n = len(alloc.bundles)
    for i in keep:
        if not 0 <= i < n:
            raise IndexError(f"agent index {i} out of range for {n} agents")
    pool = set(alloc.unallocated)
    for i, bundle in enumerate(alloc.bundles):
        if i not in keep:
            pool |= bundle
    return Allocation(tuple(alloc.bundles[i] for i in keep), frozenset(pool))


@dataclass(frozen=True)
class TransformationGraph:
    """Agent multigraph with one edge ``(i, j, g)`` per good moving from i to j."""

    node_count: int
    edges: tuple[tuple[int, int, int], ...]

    def degree_delta(self) -> list[int]:
        """indegree - outdegree per node."""
        delta = [0] * self.node_count
        for i, j, _ in self.edges:
            delta[i] -= 1
            delta[j] += 1
        return delta

    def find_cycle(self) -> list[int] | None:
        """Edge positions of the first cycle found by DFS from the lowest-index node."""
        out: dict[int, list[int]] = {}
        for pos, (i, _, _) in enumerate(self.edges):
            out.setdefault(i, []).append(pos)
        state = [0] * self.node_count  # 0 new, 1 on stack, 2 done
        stack_edges: list[int] = []
        stack_nodes: list[int] = []

        def dfs(v):
            state[v] = 1
            stack_nodes.append(v)
            for pos in out.get(v, ()):
                w = self.edges[pos][1]
                if state[w] == 1:
                    start = stack_nodes.index(w)
                    return stack_edges[start:] + [pos]
                if state[w] == 0:
                    stack_edges.append(pos)
                    found = dfs(w)
                    if found is not None:
                        return found
                    stack_edges.pop()
            stack_nodes.pop()
            state[v] = 2
            return None

        for v in range(self.node_count):
            if state[v] == 0:
                found = dfs(v)
                if found is not None:
                    return found
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


def build_transformation_graph(a: Allocation, a2: Allocation, n: int) -> TransformationGraph:
    """Edge ``(i, j, g)`` for every good g held by i in ``a`` and by j != i in ``a2``."""
    edges = []
    for i in range(n):
        for g in sorted(a.bundles[i]):
            j = a2.owner(g)
            if j is not None and j != i:
                edges.append((i, j, g))
    return TransformationGraph(n, tuple(edges))


def eliminate_cycles(graph: TransformationGraph) -> TransformationGraph:
    """Repeatedly delete a directed cycle until none remains.

    Removing a cycle leaves every node's indegree - outdegree unchanged.
    """
    while True:
        cycle = graph.find_cycle()
        if cycle is None:
            return graph
        drop = set(cycle)
        graph = TransformationGraph(graph.node_count,
                                    tuple(e for pos, e in enumerate(graph.edges) if pos not in drop))


def apply_transfers(alloc: Allocation, graph: TransformationGraph) -> Allocation:
    """Move every edge's good from its tail agent to its head agent."""
    bundles = [set(b) for b in alloc.bundles]
    for i, j, g in graph.edges:
        if g not in bundles[i]:
            raise ValueError(f"good {g} is not held by agent {i}")
        bundles[i].remove(g)
        bundles[j].add(g)
    return Allocation.of(bundles, alloc.unallocated)
