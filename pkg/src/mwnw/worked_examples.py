"""Embedded worked instances and the checks behind ``mwnw reproduce-paper``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .axioms import Mode, search_group_manipulation
from .baselines import round_robin, serial_dictatorship, weighted_leximin
from .core import Allocation, Instance, utility
from .oracle import is_pareto_optimal
from .solver import solve_mwnw_tie

# three agents, four goods, equal weights
STRONG_GSP_TRUE = Instance.from_matrix([
    [1, 1, 0, 0],
    [0, 1, 1, 0],
    [0, 0, 1, 1],
])
# agents 2 and 3 misreport g3 and g2
STRONG_GSP_REPORTED = Instance.from_matrix([
    [1, 1, 0, 0],
    [0, 1, 0, 0],
    [0, 1, 1, 1],
])

ROUND_ROBIN_PARETO = Instance.from_matrix([
    [1, 1],
    [1, 0],
])

ROUND_ROBIN_SP_TRUE = Instance.from_matrix([
    [1, 1, 1, 1, 0, 0],
    [0, 0, 1, 1, 1, 1],
])
ROUND_ROBIN_SP_REPORTED = Instance.from_matrix([
    [1, 0, 1, 1, 0, 0],
    [0, 0, 1, 1, 1, 1],
])

UNIVERSAL_3x6 = Instance.from_matrix([[1] * 6 for _ in range(3)])

LEXIMIN_TWO_AGENTS = Instance.from_matrix([[1], [1]], weights=[Fraction(2), Fraction(1)])


@dataclass(frozen=True)
class Item:
    label: str
    ok: bool
    detail: str


def _bundles(alloc: Allocation) -> list[list[int]]:
    return [sorted(b) for b in alloc.bundles]


def reproduce() -> list[Item]:
    items = []

    truthful = solve_mwnw_tie(STRONG_GSP_TRUE)
    lied = solve_mwnw_tie(STRONG_GSP_REPORTED)
    u_true, u_lied = utility(STRONG_GSP_TRUE, truthful), utility(STRONG_GSP_REPORTED, lied)
    items.append(Item(
        "a", u_true == (2, 1, 1) and u_lied == (1, 1, 2)
        and _bundles(truthful) == [[0, 1], [2], [3]] and _bundles(lied) == [[0], [1], [2, 3]],
        f"solve truthful -> {list(u_true)} {_bundles(truthful)}, reported -> {list(u_lied)} {_bundles(lied)}",
    ))

    witness = search_group_manipulation(STRONG_GSP_TRUE, 2, Mode.STRONG_GSP)
    items.append(Item(
        "b", witness is not None and witness.true_utilities_after_lie == (1, 1, 2),
        "strong-GSP witness: " + ("none" if witness is None else
                                  f"coalition {list(witness.coalition)}, true utilities "
                                  f"{list(witness.true_utilities_honest)} -> {list(witness.true_utilities_after_lie)}"),
    ))

    gsp = search_group_manipulation(STRONG_GSP_TRUE, 3, Mode.GSP)
    items.append(Item("c", gsp is None, "GSP witness: " + ("none" if gsp is None else str(gsp.coalition))))

    rr = round_robin(ROUND_ROBIN_PARETO)
    po = is_pareto_optimal(ROUND_ROBIN_PARETO, rr)
    items.append(Item("d", _bundles(rr) == [[0], [1]] and not po,
                      f"round-robin -> {_bundles(rr)}, Pareto-optimal: {po}"))

    honest = round_robin(ROUND_ROBIN_SP_TRUE)
    lie = round_robin(ROUND_ROBIN_SP_REPORTED)
    u_honest = utility(ROUND_ROBIN_SP_TRUE, honest)[0]
    u_lie = utility(ROUND_ROBIN_SP_TRUE, lie)[0]
    items.append(Item(
        "e", u_honest == 2 and u_lie == 3
        and _bundles(honest) == [[0, 1, 4], [2, 3, 5]] and _bundles(lie) == [[0, 1, 3], [2, 4, 5]],
        f"round-robin agent 1 true utility {u_honest} honest, {u_lie} after misreport",
    ))

    sd = serial_dictatorship(UNIVERSAL_3x6)
    items.append(Item("f", _bundles(sd) == [list(range(6)), [], []],
                      f"serial dictatorship on universal valuations -> {_bundles(sd)}"))

    wl = weighted_leximin(LEXIMIN_TWO_AGENTS)
    items.append(Item("g", _bundles(wl) == [[], [0]],
                      f"weighted leximin, weights (2, 1), one good -> {_bundles(wl)}"))
    return items


def render(items: list[Item]) -> str:
    lines = [f"[{'PASS' if it.ok else 'FAIL'}] ({it.label}) {it.detail}" for it in items]
    passed = sum(it.ok for it in items)
    lines.append(f"{passed}/{len(items)} items match")
    return "\n".join(lines)
