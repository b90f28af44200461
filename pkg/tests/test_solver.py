import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from mwnw.axioms import random_instance
from mwnw.core import Allocation, Instance, compare_outcomes, Ordering, utility
from mwnw.oracle import brute_force_mwnw_tie
from mwnw.solver import (
    DUMMY,
    ExchangeGraph,
    add_one_good,
    build_exchange_graph,
    candidates,
    find_path,
    select_candidate,
    solve_mwnw_tie,
    solve_trace,
)

from conftest import WEIGHT_POOL, instances


def test_prop1_truthful(prop1):
    alloc = solve_mwnw_tie(prop1)
    assert utility(prop1, alloc) == (2, 1, 1)
    assert alloc == Allocation.of([[0, 1], [2], [3]])


def test_prop1_reported(prop1_reported):
    alloc = solve_mwnw_tie(prop1_reported)
    assert utility(prop1_reported, alloc) == (1, 1, 2)
    assert alloc == Allocation.of([[0], [1], [2, 3]])


@pytest.mark.parametrize("m", [0, 1, 5])
@pytest.mark.parametrize("weight", [Fraction(1), Fraction(7, 3)])
def test_single_agent_takes_everything(m, weight):
    inst = Instance.from_matrix([[1] * m], [weight], n_goods=m)
    assert utility(inst, solve_mwnw_tie(inst)) == (m,)


def test_no_goods():
    inst = Instance.from_matrix([[], []], n_goods=0)
    assert solve_mwnw_tie(inst) == Allocation.empty(2)


def test_unvalued_goods_stay_in_pool():
    inst = Instance.from_matrix([[1, 0, 0], [0, 0, 1]])
    assert solve_mwnw_tie(inst) == Allocation.of([[0], [2]], [1])


@pytest.mark.parametrize("n,k", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_balanced_split_under_universal_valuations(n, k):
    inst = Instance.from_matrix([[1] * (n * k) for _ in range(n)])
    _, best = brute_force_mwnw_tie(inst)
    assert best == (k,) * n
    assert utility(inst, solve_mwnw_tie(inst)) == best


def test_integer_weights_get_proportional_counts():
    # weights 1, 2, 3 with six universally valued goods
    inst = Instance.from_matrix([[1] * 6] * 3, [1, 2, 3])
    assert brute_force_mwnw_tie(inst)[1] == (1, 2, 3)
    assert utility(inst, solve_mwnw_tie(inst)) == (1, 2, 3)


# -- add_one_good ---------------------------------------------------------------

def test_add_one_good_single_candidate():
    inst = Instance.from_matrix([[0], [0], [1]])
    out = add_one_good(inst, Allocation.empty(3), 0)
    assert out == Allocation.of([[], [], [0]])


def test_add_one_good_unvalued():
    inst = Instance.from_matrix([[1, 0], [0, 0]])
    partial = Allocation.of([[0], []])
    assert add_one_good(inst, partial, 1) == Allocation.of([[0], []], [1])


def test_add_one_good_chain_transfer():
    # agent 1 holds g1 (valued by both); g2 is valued only by agent 1
    inst = Instance.from_matrix([[1, 1], [1, 0]])
    partial = Allocation.of([[0], []])
    # reachable outcomes: (2, 0) directly, (1, 1) via the chain d -> 1 -> 2
    assert compare_outcomes((1, 1), (2, 0), [1, 1]) is Ordering.FIRST_PREFERRED
    out = add_one_good(inst, partial, 1)
    assert utility(inst, out) == (1, 1)
    assert out == Allocation.of([[1], [0]])


def test_add_one_good_weighted_stage_two():
    inst = Instance.from_matrix([[1, 0, 1], [0, 1, 1]], [2, 1])
    partial = Allocation.of([[0], [1]])
    # exponents (2, 1): 2^2 * 1 = 4 against 1 * 2^1 = 2
    assert 2**2 * 1**1 > 1**2 * 2**1
    out = add_one_good(inst, partial, 2)
    assert out == Allocation.of([[0, 2], [1]])


def test_add_one_good_errors():
    inst = Instance.from_matrix([[1, 1]])
    with pytest.raises(ValueError):
        add_one_good(inst, Allocation.of([[0]]), 0)
    with pytest.raises(IndexError):
        add_one_good(inst, Allocation.of([[0]]), 5)


def test_add_one_good_matches_full_compare_selection():
    rng = random.Random(5)
    checked = 0
    for _ in range(400):
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(1, 7), rng.choice([0.3, 0.5, 0.8]), WEIGHT_POOL)
        g = rng.randrange(inst.m)
        others = [x for x in range(inst.m) if x != g]
        sub = inst.sub_instance(range(inst.n), others)
        partial_sub = solve_mwnw_tie(sub)
        partial = Allocation.of([[others[x] for x in b] for b in partial_sub.bundles],
                                [others[x] for x in partial_sub.unallocated])
        cands = candidates(inst, partial, g)
        out = add_one_good(inst, partial, g)
        if not cands:
            assert g in out.unallocated
            continue
        best = select_candidate(cands, inst.weights)
        assert utility(inst, out) == best.resulting_utilities
        checked += 1
    assert checked > 200


# -- exchange graph and paths ------------------------------------------------------

def test_exchange_graph_empty_partial():
    inst = Instance.from_matrix([[1], [0], [1]])
    graph = build_exchange_graph(inst, Allocation.empty(3), 0)
    assert graph.edges == {(DUMMY, 0), (DUMMY, 2)}


def test_exchange_graph_holder_edges():
    inst = Instance.from_matrix([[1, 0], [1, 0], [1, 1]])
    graph = build_exchange_graph(inst, Allocation.of([[0], [], []]), 1)
    assert {(0, 1), (0, 2)} <= graph.edges
    assert graph.edges == {(0, 1), (0, 2), (DUMMY, 2)}


def test_exchange_graph_recount():
    rng = random.Random(9)
    for _ in range(200):
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(1, 6), 0.5, WEIGHT_POOL)
        owners = [rng.randint(-1, inst.n - 1) for _ in range(inst.m)]
        g = rng.randrange(inst.m)
        owners[g] = -1
        partial = Allocation.of([[x for x in range(inst.m) if owners[x] == i and x != g] for i in range(inst.n)])
        expected = set()
        for x, y in itertools.permutations(range(inst.n), 2):
            for good in range(inst.m):
                if owners[good] == x and good != g and inst.valuations[y][good]:
                    expected.add((x, y))
        expected |= {(DUMMY, i) for i in range(inst.n) if inst.valuations[i][g]}
        assert build_exchange_graph(inst, partial, g).edges == expected


def test_find_path_direct_and_unreachable():
    graph = ExchangeGraph(3, {DUMMY: (1,), 0: (), 1: (), 2: ()})
    assert find_path(graph, 1) == (DUMMY, 1)
    assert find_path(graph, 2) is None


def test_find_path_diamond_prefers_lower_index():
    graph = ExchangeGraph(3, {DUMMY: (0, 1), 0: (2,), 1: (2,), 2: ()})
    paths = [(DUMMY, 0, 2), (DUMMY, 1, 2)]
    assert find_path(graph, 2) == min(paths)


def test_find_path_is_shortest():
    graph = ExchangeGraph(4, {DUMMY: (0, 3), 0: (1,), 1: (2,), 2: (), 3: (2,)})
    assert find_path(graph, 2) == (DUMMY, 3, 2)


# -- invariants ------------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(instances(max_n=4, max_m=6))
def test_every_prefix_is_optimal(inst):
    trace = solve_trace(inst)
    for t in range(inst.m + 1):
        prefix = inst.sub_instance(range(inst.n), range(t))
        assert trace[t] == brute_force_mwnw_tie(prefix)[1]


@settings(max_examples=200, deadline=None)
@given(instances(max_n=6, max_m=10))
def test_one_coordinate_grows_per_valued_good(inst):
    trace = solve_trace(inst)
    for g in range(inst.m):
        diff = [b - a for a, b in zip(trace[g], trace[g + 1])]
        if g in inst.valued_goods:
            assert sorted(diff) == [0] * (inst.n - 1) + [1]
        else:
            assert not any(diff)


@settings(max_examples=200, deadline=None)
@given(instances(max_n=6, max_m=10))
def test_holders_value_what_they_hold(inst):
    alloc = solve_mwnw_tie(inst)
    for i, bundle in enumerate(alloc.bundles):
        assert all(inst.valuations[i][g] for g in bundle)
    assert alloc.allocated == inst.valued_goods


@given(instances(max_n=4, max_m=6))
def test_solver_deterministic(inst):
    assert solve_mwnw_tie(inst) == solve_mwnw_tie(inst)


def test_goods_order_does_not_change_utilities():
    rng = random.Random(21)
    for _ in range(100):
        inst = random_instance(rng, rng.randint(1, 5), rng.randint(0, 8), 0.5, WEIGHT_POOL)
        order = list(range(inst.m))
        rng.shuffle(order)
        shuffled = Instance(inst.agent_names, tuple(inst.good_names[g] for g in order), inst.weights,
                            tuple(tuple(row[g] for g in order) for row in inst.valuations))
        assert utility(inst, solve_mwnw_tie(inst)) == utility(shuffled, solve_mwnw_tie(shuffled))
