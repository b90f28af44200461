import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwnw.axioms import (
    BudgetExceeded,
    Mode,
    SuiteConfig,
    check_ownership_lemma,
    check_population_monotonicity,
    check_resource_monotonicity,
    check_subset_restriction,
    manipulation_search_size,
    run_suite,
    run_trial,
    SuiteReport,
    search_group_manipulation,
    solved_utilities,
)
from mwnw.core import Allocation, Instance, InstanceError, utility
from mwnw.oracle import brute_force_mwnw_tie
from mwnw.solver import solve_mwnw_tie

from conftest import instances


def test_ownership_on_solver_output(prop1):
    assert check_ownership_lemma(prop1, solve_mwnw_tie(prop1))


def test_ownership_rejects_unvalued_holding(prop1):
    assert not check_ownership_lemma(prop1, Allocation.of([[0, 1, 2], [], [3]]))


def test_ownership_rejects_incomplete(prop1):
    assert not check_ownership_lemma(prop1, Allocation.of([[0, 1], [2], []], [3]))


def test_resource_all_zero_column(prop1):
    assert check_resource_monotonicity(prop1, [0, 0, 0])
    assert solved_utilities(prop1.with_good([0, 0, 0])) == solved_utilities(prop1)


def test_resource_column_for_zero_utility_agent():
    inst = Instance.from_matrix([[1, 1], [0, 0], [1, 0]])
    assert solved_utilities(inst) == (1, 0, 1)
    bigger = inst.with_good([0, 1, 0])
    assert brute_force_mwnw_tie(bigger)[1] == (1, 1, 1)
    assert check_resource_monotonicity(inst, [0, 1, 0])


def test_resource_column_length_mismatch(prop1):
    with pytest.raises(InstanceError):
        check_resource_monotonicity(prop1, [1, 0])


def test_population_agent_valuing_nothing(prop1):
    assert check_population_monotonicity(prop1, [0, 0, 0, 0], Fraction(1))
    assert solved_utilities(prop1.with_agent([0, 0, 0, 0], Fraction(1)))[:3] == solved_utilities(prop1)


def test_population_identical_agent():
    inst = Instance.from_matrix([[1, 1]])
    assert brute_force_mwnw_tie(inst)[1] == (2,)
    assert brute_force_mwnw_tie(inst.with_agent([1, 1], Fraction(1)))[1] == (1, 1)
    assert check_population_monotonicity(inst, [1, 1], Fraction(1))


def test_population_errors(prop1):
    with pytest.raises(InstanceError):
        check_population_monotonicity(prop1, [1], Fraction(1))
    with pytest.raises(InstanceError):
        check_population_monotonicity(prop1, [1, 1, 1, 1], Fraction(0))


@settings(max_examples=150, deadline=None)
@given(instances(max_n=5, max_m=8), st.data())
def test_monotonicity_properties(inst, data):
    column = data.draw(st.lists(st.integers(0, 1), min_size=inst.n, max_size=inst.n))
    row = data.draw(st.lists(st.integers(0, 1), min_size=inst.m, max_size=inst.m))
    weight = data.draw(st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(3)]))
    assert check_resource_monotonicity(inst, column)
    assert check_population_monotonicity(inst, row, weight)


def test_subset_restriction_all_agents(prop1):
    assert check_subset_restriction(prop1, [0, 1, 2])


def test_subset_restriction_prop1(prop1):
    # agents 2 and 3 keep g3 and g4
    sub = prop1.sub_instance([1, 2], [2, 3])
    assert brute_force_mwnw_tie(sub)[1] == (1, 1)
    assert check_subset_restriction(prop1, [1, 2])


@settings(max_examples=100, deadline=None)
@given(instances(max_n=4, max_m=6), st.data())
def test_subset_restriction_property(inst, data):
    subset = data.draw(st.sets(st.integers(0, inst.n - 1)))
    assert check_subset_restriction(inst, sorted(subset))


# -- manipulation search -----------------------------------------------------------

def test_strong_gsp_witness_on_prop1(prop1):
    w = search_group_manipulation(prop1, 2, Mode.STRONG_GSP)
    assert w is not None
    assert w.coalition == (1, 2)
    assert w.true_utilities_honest == (2, 1, 1)
    assert w.true_utilities_after_lie == (1, 1, 2)
    # non-members report truthfully
    assert w.reported_profile[0] == w.true_profile[0]
    solved = solve_mwnw_tie(prop1.with_valuations(w.reported_profile))
    assert utility(prop1, solved) == (1, 1, 2)


def test_gsp_absent_on_prop1(prop1):
    assert search_group_manipulation(prop1, 3, Mode.GSP) is None


def test_gsp_absent_single_agent():
    inst = Instance.from_matrix([[1]])
    assert search_group_manipulation(inst, 1, Mode.GSP) is None


def test_no_singleton_strong_witness(prop1):
    # singleton strong-GSP is plain strategyproofness
    assert search_group_manipulation(prop1, 1, Mode.STRONG_GSP) is None


def test_search_budget():
    inst = Instance.from_matrix([[1] * 4] * 3)
    assert manipulation_search_size(3, 4, 2) == 3 * 16 + 3 * 256
    with pytest.raises(BudgetExceeded):
        search_group_manipulation(inst, 2, Mode.GSP, budget=3 * 16 + 3 * 256 - 1)


def test_witness_json(prop1):
    w = search_group_manipulation(prop1, 2, Mode.STRONG_GSP)
    data = json.loads(json.dumps(w.to_json()))
    assert data["coalition"] == [1, 2] and data["mode"] == "strong-gsp"


@settings(max_examples=60, deadline=None)
@given(instances(max_n=3, max_m=3, weights=(Fraction(1), Fraction(1, 2), Fraction(2))))
def test_no_gsp_witness_small(inst):
    assert search_group_manipulation(inst, inst.n, Mode.GSP) is None


# -- suite ------------------------------------------------------------------------

def test_suite_zero_trials():
    report = run_suite(SuiteConfig(seed=1, trials=0))
    assert report.passed and report.trials == 0


def test_suite_deterministic():
    a = run_suite(SuiteConfig(seed=7, trials=30))
    b = run_suite(SuiteConfig(seed=7, trials=30))
    assert a.trials == b.trials == 30
    assert a.failures == b.failures
    assert a.seed == 7 and a.generator


def test_suite_seed42():
    report = run_suite(SuiteConfig(seed=42, trials=500, n_range=(1, 4), m_range=(0, 6)))
    assert report.trials == 500
    assert report.failures == []


def test_suite_rejects_unknown_check():
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(checks=("nope",)))


def test_failures_carry_replayable_seeds(monkeypatch):
    import mwnw.axioms as axioms

    monkeypatch.setattr(axioms, "check_ownership_lemma", lambda inst, alloc: inst.m < 3)
    report = run_suite(SuiteConfig(seed=3, trials=20, checks=("ownership",)))
    assert report.failures
    seed = report.failures[0]["seed"]
    replay = SuiteReport()
    run_trial(seed, SuiteConfig(checks=("ownership",)), replay)
    assert replay.failures == [report.failures[0]]
    data = json.loads(report.dumps())
    assert set(data) >= {"trials", "failures", "elapsed_ms"}
    assert set(data["failures"][0]) == {"seed", "kind", "detail"}
