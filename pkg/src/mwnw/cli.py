"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 internal invariant breach
(a solver output failed its own ownership check), 3 reproduction mismatch.
Nonzero is also returned by ``check`` when a check fails.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from fractions import Fraction

from . import worked_examples
from .axioms import (
    CHECKS,
    DEFAULT_SEARCH_BUDGET,
    SUITE_CHECKS,
    BudgetExceeded,
    Mode,
    SuiteConfig,
    SuiteReport,
    check_ownership_lemma,
    check_oracle_equivalence,
    check_population_monotonicity,
    check_resource_monotonicity,
    check_subset_restriction,
    parse_weight_pool,
    random_instance,
    run_suite,
    search_group_manipulation,
)
from .baselines import RULES
from .core import Allocation, Instance, InstanceError, format_weight, parse_instance, utility
from .oracle import GuardExceeded, SizeGuard, brute_force_mwnw_tie
from .solver import solve_mwnw_tie

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_MISMATCH = 0, 1, 2, 3
# file-mode checks enumerate at most this many columns, rows or subsets
FILE_CHECK_CAP = 256


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _load(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except InstanceError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _allocation_json(inst: Instance, alloc: Allocation) -> dict:
    out = alloc.to_json(inst)
    out["utilities"] = list(utility(inst, alloc))
    return out


def _pretty(inst: Instance, alloc: Allocation) -> str:
    u = utility(inst, alloc)
    rows = [("agent", "weight", "utility", "bundle")]
    for i, name in enumerate(inst.agent_names):
        bundle = ", ".join(inst.good_names[g] for g in sorted(alloc.bundles[i])) or "-"
        rows.append((name, format_weight(inst.weights[i]), str(u[i]), bundle))
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    pool = ", ".join(inst.good_names[g] for g in sorted(alloc.unallocated)) or "-"
    lines.append(f"unallocated: {pool}")
    return "\n".join(lines)


def _emit(inst: Instance, alloc: Allocation, pretty: bool) -> None:
    print(_pretty(inst, alloc) if pretty else json.dumps(_allocation_json(inst, alloc)))


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    alloc = solve_mwnw_tie(inst)
    if not check_ownership_lemma(inst, alloc):
        print("internal error: solver output violates the ownership invariant", file=sys.stderr)
        return EXIT_INVARIANT
    _emit(inst, alloc, args.pretty)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    try:
        alloc, _ = brute_force_mwnw_tie(inst, SizeGuard(args.guard))
    except GuardExceeded as exc:
        raise UsageError(str(exc)) from None
    _emit(inst, alloc, args.pretty)
    return EXIT_OK


def cmd_baseline(args) -> int:
    inst = _load(args.instance)
    rule = RULES[args.name]
    try:
        alloc = rule(inst, SizeGuard(args.guard)) if args.name == "weighted-leximin" else rule(inst)
    except GuardExceeded as exc:
        raise UsageError(str(exc)) from None
    _emit(inst, alloc, args.pretty)
    return EXIT_OK


def cmd_manipulate(args) -> int:
    inst = _load(args.instance)
    mode = Mode(args.mode)
    try:
        witness = search_group_manipulation(inst, args.max_coalition, mode, args.budget)
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps({"mode": mode.value, "witness": None if witness is None else witness.to_json()}))
    return EXIT_OK


def _int_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    lo, hi = int(lo), int(hi or lo)
    if lo > hi:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


def cmd_gen(args) -> int:
    if args.n < 1 or args.m < 0 or not 0 <= args.density <= 1:
        raise UsageError("need n >= 1, m >= 0 and 0 <= density <= 1")
    pool = _weights(args.weights)
    rng = random.Random(args.seed)
    print(random_instance(rng, args.n, args.m, args.density, pool).dumps())
    return EXIT_OK


def _weights(text: str | None) -> tuple[Fraction, ...]:
    if text is None:
        return SuiteConfig.weight_pool
    try:
        pool = parse_weight_pool(text)
    except InstanceError as exc:
        raise UsageError(f"--weights: {exc}") from None
    if not pool:
        raise UsageError("--weights: empty pool")
    return pool


def _check_file(inst: Instance, checks: tuple[str, ...], args) -> tuple[SuiteReport, list]:
    report = SuiteReport(seed=args.seed)
    witnesses = []
    rng = random.Random(args.seed)
    guard = SizeGuard(args.guard)
    pool = _weights(args.weights)
    start = time.perf_counter()

    def some(space_size, all_items, sample):
        if space_size <= FILE_CHECK_CAP:
            return list(all_items)
        return [sample() for _ in range(FILE_CHECK_CAP)]

    if "ownership" in checks and not check_ownership_lemma(inst, solve_mwnw_tie(inst)):
        report.fail(args.seed, "ownership", "solver output violates ownership/minimal completeness")
    if "resource" in checks:
        for col in some(2**inst.n, itertools.product((0, 1), repeat=inst.n),
                        lambda: tuple(rng.randint(0, 1) for _ in range(inst.n))):
            if not check_resource_monotonicity(inst, col):
                report.fail(args.seed, "resource", f"adding good {list(col)}")
    if "population" in checks:
        for row in some(2**inst.m, itertools.product((0, 1), repeat=inst.m),
                        lambda: tuple(rng.randint(0, 1) for _ in range(inst.m))):
            for w in pool:
                if not check_population_monotonicity(inst, row, w):
                    report.fail(args.seed, "population", f"adding agent {list(row)} with weight {format_weight(w)}")
    if "subset" in checks:
        subsets = some(2**inst.n, (list(itertools.compress(range(inst.n), mask))
                                   for mask in itertools.product((0, 1), repeat=inst.n)),
                       lambda: [i for i in range(inst.n) if rng.random() < 0.5])
        for subset in subsets:
            try:
                if not check_subset_restriction(inst, subset, guard):
                    report.fail(args.seed, "subset", f"restriction to {subset}")
            except GuardExceeded as exc:
                raise UsageError(str(exc)) from None
    if "oracle-equiv" in checks:
        try:
            if not check_oracle_equivalence(inst, guard):
                report.fail(args.seed, "oracle-equiv", "solver and oracle disagree")
        except GuardExceeded as exc:
            raise UsageError(str(exc)) from None
    for name, mode in (("gsp", Mode.GSP), ("strong-gsp", Mode.STRONG_GSP)):
        if name in checks:
            try:
                w = search_group_manipulation(inst, args.max_coalition, mode, args.budget)
            except BudgetExceeded as exc:
                raise UsageError(str(exc)) from None
            if w is not None:
                witnesses.append(w.to_json())
                if mode is Mode.GSP:
                    report.fail(args.seed, "gsp", json.dumps(w.to_json()))
    report.trials = 1
    report.elapsed = time.perf_counter() - start
    return report, witnesses


_KEYS = {"seed", "trials", "n", "m", "density", "weights", "max-coalition", "guard"}


def cmd_check(args) -> int:
    selector = None
    for token in args.items:
        if "=" in token:
            key, _, value = token.partition("=")
            if key not in _KEYS:
                raise UsageError(f"unknown setting {key!r}")
            setattr(args, key.replace("-", "_"), value)
        elif selector is None:
            selector = token
        else:
            raise UsageError(f"more than one selector: {selector!r}, {token!r}")
    if selector is None:
        raise UsageError("missing check selector")
    if selector != "all" and selector not in CHECKS:
        raise UsageError(f"unknown selector {selector!r}; choose from {', '.join(CHECKS + ('all',))}")
    try:
        args.seed, args.trials = int(args.seed), int(args.trials)
        args.max_coalition, args.guard = int(args.max_coalition), int(args.guard)
        n_range, m_range = _int_range(str(args.n)), _int_range(str(args.m))
        densities = tuple(float(d) for d in str(args.density).split(","))
    except ValueError as exc:
        raise UsageError(f"bad setting: {exc}") from None
    if args.trials < 0 or n_range[0] < 1 or m_range[0] < 0 or not all(0 <= d <= 1 for d in densities):
        raise UsageError("need trials >= 0, n >= 1, m >= 0, 0 <= density <= 1")
    if args.max_coalition < 1:
        raise UsageError("max-coalition must be positive")
    checks = SUITE_CHECKS if selector == "all" else (selector,)

    if args.instance:
        inst = _load(args.instance)
        report, witnesses = _check_file(inst, checks, args)
        out = report.to_json()
        if "strong-gsp" in checks or "gsp" in checks:
            out["witnesses"] = witnesses
    else:
        config = SuiteConfig(seed=args.seed, trials=args.trials, n_range=n_range, m_range=m_range,
                             densities=densities, weight_pool=_weights(args.weights), checks=checks,
                             guard=args.guard, max_coalition=args.max_coalition)
        report = run_suite(config)
        out = report.to_json()
    print(json.dumps(out))
    for failure in report.failures:
        print(f"FAIL {failure['kind']} replay-seed={failure['seed']}: {failure['detail']}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_reproduce(args) -> int:
    items = worked_examples.reproduce()
    print(worked_examples.render(items))
    bad = [it.label for it in items if not it.ok]
    if bad:
        print(f"mismatched items: {', '.join(bad)}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mwnw", description="Weighted Nash welfare allocation under binary valuations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_instance(p, required=True):
        p.add_argument("--instance", required=required, help="instance JSON file")

    p = sub.add_parser("solve", help="polynomial-time MWNW-tie allocation")
    with_instance(p)
    p.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force MWNW-tie allocation")
    with_instance(p)
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--guard", type=int, default=10**7, help="max allocations to enumerate")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("baseline", help="run a comparison rule")
    p.add_argument("name", choices=sorted(RULES))
    with_instance(p)
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--guard", type=int, default=10**7)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("check", help="run axiom checks on a file or on random instances")
    p.add_argument("items", nargs="+", metavar="SELECTOR|key=value",
                   help=f"one of {', '.join(CHECKS + ('all',))}, plus optional key=value settings")
    with_instance(p, required=False)
    p.add_argument("--random", action="store_true", help="random suite (default when no --instance)")
    p.add_argument("--seed", default=0)
    p.add_argument("--trials", default=100)
    p.add_argument("--n", default="1-4", help="agent-count range, e.g. 1-4")
    p.add_argument("--m", default="0-6", help="good-count range, e.g. 0-6")
    p.add_argument("--density", default="0.3,0.5,0.8")
    p.add_argument("--weights", default=None, help="comma-separated rational weight pool")
    p.add_argument("--max-coalition", dest="max_coalition", default=2)
    p.add_argument("--guard", default=10**5)
    p.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("manipulate", help="exhaustive coalition manipulation search")
    with_instance(p)
    p.add_argument("--max-coalition", dest="max_coalition", type=int, default=2)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.GSP.value)
    p.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("gen", help="seeded random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", "--n", dest="n", type=int, required=True)
    p.add_argument("-m", "--m", dest="m", type=int, required=True)
    p.add_argument("-p", "--density", dest="density", type=float, default=0.5)
    p.add_argument("--weights", default=None, help="comma-separated rational weight pool")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reproduce-paper", help="re-run every embedded worked example")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    if getattr(args, "instance", None) and getattr(args, "random", False):
        print("mwnw: error: --instance and --random are mutually exclusive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mwnw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
