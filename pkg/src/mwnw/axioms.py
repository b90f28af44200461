"""Falsification harness for the rule's monotonicity and manipulation guarantees.

Everything here compares utility vectors, never allocations: several
allocations can be optimal, but they all share one utility vector.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .core import Instance, InstanceError, is_minimally_complete, parse_weight, restrict, utility
from .oracle import GuardExceeded, SizeGuard, brute_force_mwnw_tie
from .solver import solve_masks, solve_mwnw_tie

DEFAULT_SEARCH_BUDGET = 10**6
GENERATOR = "random.Random (MT19937), per-trial seeds drawn with getrandbits(63)"


class BudgetExceeded(RuntimeError):
    pass


class Mode(enum.Enum):
    GSP = "gsp"
    STRONG_GSP = "strong-gsp"


@dataclass(frozen=True)
class ManipulationWitness:
    coalition: tuple[int, ...]
    true_profile: tuple[tuple[int, ...], ...]
    reported_profile: tuple[tuple[int, ...], ...]
    true_utilities_honest: tuple[int, ...]
    true_utilities_after_lie: tuple[int, ...]
    mode: Mode

    def to_json(self) -> dict:
        return {
            "coalition": list(self.coalition),
            "mode": self.mode.value,
            "true_profile": [list(r) for r in self.true_profile],
            "reported_profile": [list(r) for r in self.reported_profile],
            "true_utilities_honest": list(self.true_utilities_honest),
            "true_utilities_after_lie": list(self.true_utilities_after_lie),
        }


@dataclass
class SuiteReport:
    trials: int = 0
    failures: list[dict] = field(default_factory=list)
    elapsed: float = 0.0
    seed: int | None = None
    generator: str = GENERATOR

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, seed, kind: str, detail: str) -> None:
        self.failures.append({"seed": seed, "kind": kind, "detail": detail})

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "elapsed_ms": round(self.elapsed * 1000),
            "seed": self.seed,
            "generator": self.generator,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def solved_utilities(inst: Instance) -> tuple[int, ...]:
    return utility(inst, solve_mwnw_tie(inst))


def check_ownership_lemma(inst: Instance, alloc) -> bool:
    """Every agent values every good she holds, and the allocation is minimally complete."""
    for i, bundle in enumerate(alloc.bundles):
        if any(not inst.valuations[i][g] for g in bundle):
            return False
    return is_minimally_complete(inst, alloc)


def check_resource_monotonicity(inst: Instance, new_column: Sequence[int]) -> bool:
    """Adding a good never hurts anyone; a valued one helps exactly one agent by exactly one."""
    before = solved_utilities(inst)
    after = solved_utilities(inst.with_good(new_column))
    if any(a < b for a, b in zip(after, before)):
        return False
    diff = [a - b for a, b in zip(after, before)]
    if any(new_column):
        return sorted(diff) == [0] * (inst.n - 1) + [1]
    return not any(diff)


def check_population_monotonicity(inst: Instance, new_agent_row: Sequence[int], new_weight: Fraction) -> bool:
    """Adding an agent never raises an existing agent's utility."""
    if new_weight <= 0:
        raise InstanceError(f"non-positive weight {new_weight!r}")
    before = solved_utilities(inst)
    after = solved_utilities(inst.with_agent(new_agent_row, new_weight))
    return all(a <= b for a, b in zip(after, before))


def check_subset_restriction(inst: Instance, subset: Sequence[int], guard: SizeGuard | None = None) -> bool:
    """A restricted solution is optimal for the sub-instance it induces."""
    alloc = solve_mwnw_tie(inst)
    agents = sorted(set(subset))
    if not agents:
        return True
    kept = restrict(alloc, agents)
    goods = sorted(kept.allocated)
    sub = inst.sub_instance(agents, goods)
    position = {g: k for k, g in enumerate(goods)}
    relabelled = type(kept).of(([position[g] for g in b] for b in kept.bundles))
    _, best = brute_force_mwnw_tie(sub, guard)
    return utility(sub, relabelled) == best


def check_oracle_equivalence(inst: Instance, guard: SizeGuard | None = None) -> bool:
    return solved_utilities(inst) == brute_force_mwnw_tie(inst, guard)[1]


def manipulation_search_size(n: int, m: int, max_coalition: int) -> int:
    """Number of reported instances the exhaustive search solves."""
    return sum(math.comb(n, k) * 2 ** (m * k) for k in range(1, min(max_coalition, n) + 1))


def _true_utilities(valued: Sequence[int], bundles: Sequence[int]) -> tuple[int, ...]:
    return tuple(bin(b & v).count("1") for b, v in zip(bundles, valued))


def _iter_manipulations(inst: Instance, max_coalition: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    rows = range(2**inst.m)
    for k in range(1, min(max_coalition, inst.n) + 1):
        for coalition in itertools.combinations(range(inst.n), k):
            for reports in itertools.product(rows, repeat=k):
                yield coalition, reports


def search_group_manipulation(inst: Instance, max_coalition: int, mode: Mode,
                              budget: int = DEFAULT_SEARCH_BUDGET) -> ManipulationWitness | None:
    """Exhaustively look for a coalition misreport that profits in true utilities.

    Coalitions are tried by size, then lexicographically; each member's
    report ranges over all 2^m binary rows, truthful row included.
    """
    if max_coalition < 1:
        raise ValueError("max_coalition must be positive")
    size = manipulation_search_size(inst.n, inst.m, max_coalition)
    if size > budget:
        raise BudgetExceeded(f"{size} reported instances exceed the search budget of {budget}")
    valued = inst.valued_masks
    honest = _true_utilities(valued, solve_masks(valued, inst.weights, inst.m)[0])
    for coalition, reports in _iter_manipulations(inst, max_coalition):
        reported = list(valued)
        for i, r in zip(coalition, reports):
            reported[i] = r
        after = _true_utilities(valued, solve_masks(reported, inst.weights, inst.m)[0])
        gains = [after[i] - honest[i] for i in coalition]
        if mode is Mode.GSP:
            hit = all(d > 0 for d in gains)
        else:
            hit = all(d >= 0 for d in gains) and any(d > 0 for d in gains)
        if hit:
            def as_rows(masks):
                return tuple(tuple((mask >> g) & 1 for g in range(inst.m)) for mask in masks)
            return ManipulationWitness(coalition, inst.valuations, as_rows(reported), honest, after, mode)
    return None


# -- random suite -----------------------------------------------------------

CHECKS = ("ownership", "resource", "population", "subset", "gsp", "strong-gsp", "oracle-equiv")
SUITE_CHECKS = ("ownership", "resource", "population", "subset", "gsp", "oracle-equiv")


@dataclass
class SuiteConfig:
    seed: int = 0
    trials: int = 100
    n_range: tuple[int, int] = (1, 4)
    m_range: tuple[int, int] = (0, 6)
    densities: tuple[float, ...] = (0.3, 0.5, 0.8)
    weight_pool: tuple[Fraction, ...] = (Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2), Fraction(3))
    checks: tuple[str, ...] = SUITE_CHECKS
    guard: int = 10**5
    # per-trial cap on solved misreports; the coalition size shrinks to fit
    manipulation_budget: int = 3000
    max_coalition: int = 2


def random_instance(rng: random.Random, n: int, m: int, density: float,
                    weight_pool: Sequence[Fraction]) -> Instance:
    rows = [[int(rng.random() < density) for _ in range(m)] for _ in range(n)]
    weights = [rng.choice(weight_pool) for _ in range(n)]
    return Instance.from_matrix(rows, weights, n_goods=m)


def trial_seeds(seed: int, trials: int) -> list[int]:
    master = random.Random(seed)
    return [master.getrandbits(63) for _ in range(trials)]


def run_trial(trial_seed: int, config: SuiteConfig, report: SuiteReport) -> None:
    rng = random.Random(trial_seed)
    n = rng.randint(*config.n_range)
    m = rng.randint(*config.m_range)
    density = rng.choice(config.densities)
    inst = random_instance(rng, n, m, density, config.weight_pool)
    run_checks(inst, config, report, rng, trial_seed)


def run_checks(inst: Instance, config: SuiteConfig, report: SuiteReport, rng: random.Random, seed) -> None:
    """Run the configured checks on one instance, recording failures under ``seed``."""
    guard = SizeGuard(config.guard)
    checks = config.checks
    alloc = solve_mwnw_tie(inst)
    if "ownership" in checks and not check_ownership_lemma(inst, alloc):
        report.fail(seed, "ownership", f"solver output violates ownership/minimal completeness: {inst.dumps()}")
    if "resource" in checks:
        column = [int(rng.random() < 0.5) for _ in range(inst.n)]
        if not check_resource_monotonicity(inst, column):
            report.fail(seed, "resource", f"adding good {column} to {inst.dumps()}")
    if "population" in checks:
        row = [int(rng.random() < 0.5) for _ in range(inst.m)]
        weight = rng.choice(config.weight_pool)
        if not check_population_monotonicity(inst, row, weight):
            report.fail(seed, "population", f"adding agent {row} with weight {weight} to {inst.dumps()}")
    if "subset" in checks:
        subset = [i for i in range(inst.n) if rng.random() < 0.5]
        try:
            if not check_subset_restriction(inst, subset, guard):
                report.fail(seed, "subset", f"restriction to {subset} of {inst.dumps()}")
        except GuardExceeded:
            pass
    if "oracle-equiv" in checks:
        try:
            if not check_oracle_equivalence(inst, guard):
                report.fail(seed, "oracle-equiv", f"solver and oracle disagree on {inst.dumps()}")
        except GuardExceeded:
            pass
    for name, mode in (("gsp", Mode.GSP), ("strong-gsp", Mode.STRONG_GSP)):
        if name not in checks:
            continue
        k = config.max_coalition
        while k > 0 and manipulation_search_size(inst.n, inst.m, k) > config.manipulation_budget:
            k -= 1
        if k == 0:
            continue
        witness = search_group_manipulation(inst, k, mode, config.manipulation_budget)
        if witness is not None and mode is Mode.GSP:
            report.fail(seed, "gsp", f"witness {json.dumps(witness.to_json())} on {inst.dumps()}")
        # strong-GSP witnesses are expected to exist and are not failures


def run_suite(config: SuiteConfig) -> SuiteReport:
    """Seed-deterministic random falsification run over all configured checks."""
    for name in config.checks:
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r}")
    report = SuiteReport(seed=config.seed)
    start = time.perf_counter()
    for trial_seed in trial_seeds(config.seed, config.trials):
        run_trial(trial_seed, config, report)
        report.trials += 1
    report.elapsed = time.perf_counter() - start
    return report


def parse_weight_pool(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_weight(t.strip()) for t in text.split(",") if t.strip())
