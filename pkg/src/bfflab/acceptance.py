"""The acceptance suite: eight property checks at desk scale.

Each criterion is deterministic (fixed seeds, fixed families) and returns
a CriterionResult carrying a pass flag, a detail string, and its runtime.
`run_all` prints one line per criterion; the CLI `selftest` subcommand and
tests/test_acceptance.py both drive it.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import generators
from .bounds import check_majorization, infer_bound, sample_inputs
from .fixture_access import fixture_text
from .formats import parse_sop
from .otm import check_time_bound, parse_machine, run as run_machine
from .schemes import (
    PbrplTrace,
    compile_mlrn,
    direct_mlrn,
    eval_pbrpl_clocked,
    eval_pbrpl_unclocked,
    kstar,
    length_bound_value,
)
from .sop import depth, is_regular, regularize, sop_eval, witness_check, witness_terms
from .terms import Oracle, bitlen


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, passed, detail, time.perf_counter() - start)


def criterion_1_witness_biconditional() -> CriterionResult:
    def check() -> tuple[bool, str]:
        disagreements = 0
        checked = 0
        for name, poly, xs in generators.witness_family():
            assert is_regular(poly), name
            assert depth(poly) <= 2
            terms = witness_terms(poly)
            for f in generators.all_oracle_tables(domain=4, max_value=7):
                report = witness_check(poly, terms, [f], xs, range(256))
                checked += report.checked
                disagreements += len(report.disagreements)
        return disagreements == 0, f"{checked} (polynomial, table, u) checks, {disagreements} disagreements"

    return _timed(1, "witness-biconditional", check)


def criterion_2_kstar_equivalence() -> CriterionResult:
    def check() -> tuple[bool, str]:
        values = np.arange(4096, dtype=np.int64)
        lengths = np.array([bitlen(int(v)) for v in range(4096)], dtype=np.int64)
        bad = 0
        for k in range(4096):
            ks = kstar(k)
            lhs = values <= ks
            rhs = lengths <= lengths[k]
            bad += int(np.count_nonzero(lhs != rhs))
        return bad == 0, f"4096x4096 pairs, {bad} exceptions"

    return _timed(2, "kstar-equivalence", check)


def criterion_3_mlrn_construction() -> CriterionResult:
    def check() -> tuple[bool, str]:
        mismatches = 0
        systems = generators.mlrn_family()
        for name, system, alpha in systems:
            compiled = compile_mlrn(system)
            direct = direct_mlrn(system)
            for u in range(1024):
                for c, d in zip(compiled, direct):
                    if c(u, alpha) != d(u, alpha):
                        mismatches += 1
        three, alpha3 = generators.mlrn_three_functional_system()
        compiled = compile_mlrn(three)
        direct = direct_mlrn(three)
        for u in range(1024):
            for c, d in zip(compiled, direct):
                if c(u, alpha3) != d(u, alpha3):
                    mismatches += 1
        n = len(systems)
        return mismatches == 0, f"{n} two-functional systems + one three-functional, u < 1024, {mismatches} mismatches"

    return _timed(3, "mlrn-construction", check)


def criterion_4_pbrpl_clocked() -> CriterionResult:
    def check() -> tuple[bool, str]:
        from .schemes import validate_pbrpl

        mismatches = 0
        unclocked_aborts = 0
        systems = generators.pbrpl_family()
        for name, system, oracles, args_list in systems:
            report = validate_pbrpl(system, oracles, args_list)
            assert report.ok, (name, report)
            for f in oracles:
                for xs in args_list:
                    trace = PbrplTrace()
                    got = eval_pbrpl_clocked(system, f, xs, trace=trace)
                    if trace.abort != "clock":
                        unclocked_aborts += 1
                    steps = length_bound_value(system, f, xs)
                    want = eval_pbrpl_unclocked(system, f, xs, steps)
                    if got != want:
                        mismatches += 1
        return (
            mismatches == 0 and unclocked_aborts == 0,
            f"{len(systems)} validated systems, {mismatches} mismatches, "
            f"{unclocked_aborts} non-clock terminations",
        )

    return _timed(4, "pbrpl-clocked-equivalence", check)


def criterion_5_majorization() -> CriterionResult:
    def check() -> tuple[bool, str]:
        rng = random.Random(0xB07)
        violations = 0
        checked_terms = 0
        for i in range(500):
            k = rng.choice([0, 1, 1, 2])
            l = rng.choice([1, 2, 2, 3])
            term = generators.random_term(rng, (k, l), depth=4)
            samples = sample_inputs((k, l), 200, rng, max_arg_bits=6, table_domain=12)
            report = check_majorization(
                term, infer_bound(term), samples, norm_cap=10**9
            )
            violations += len(report.violations)
            checked_terms += 1
        return violations == 0, f"{checked_terms} terms x 200 samples, {violations} violations"

    return _timed(5, "townsend-majorization", check)


def criterion_6_otm_protocol_and_costs() -> CriterionResult:
    def check() -> tuple[bool, str]:
        ap = parse_machine(fixture_text("ap.otm"))
        ffx = parse_machine(fixture_text("ffx.otm"))
        inc = parse_machine(fixture_text("inc.otm"))
        f = Oracle({i: (i * i + 3) % 251 for i in range(256)}, default=7)
        failures = 0
        runs = 0
        for x in range(256):
            for machine, oracles, want in (
                (ap, [f], f.peek(x)),
                (ffx, [f], f.peek(f.peek(x))),
                (inc, [], x + 1),
            ):
                protocol_bad = 0
                seen_queries = 0

                def watch(config, machine=machine):
                    # after every query: input tape erased, both heads home
                    nonlocal protocol_bad, seen_queries
                    if config.queries == seen_queries:
                        return
                    seen_queries = config.queries
                    for j in range(machine.oracle_count):
                        tin = config.tapes[machine.tape_index("oracle-in", j)]
                        tout = config.tapes[machine.tape_index("oracle-out", j)]
                        if tin.occupied() != 0 or tin.head != 0 or tout.head != 0:
                            protocol_bad += 1

                result = run_machine(machine, oracles, [x], watcher=watch)
                runs += 1
                if result.output != want:
                    failures += 1
                if result.t_len != result.t_unit - result.queries + result.kc_oracle_cost:
                    failures += 1
                failures += protocol_bad
        return failures == 0, f"{runs} runs, {failures} violations"

    return _timed(6, "otm-protocol-and-costs", check)


def criterion_7_time_bounds() -> CriterionResult:
    def check() -> tuple[bool, str]:
        rng = random.Random(0x7B)
        oracle_pool = [
            Oracle({i: rng.randrange(256) for i in range(16)}, default=0)
            for _ in range(6)
        ]
        oracle_pool.append(Oracle({}, default=0))
        oracle_pool.append(Oracle({i: 255 for i in range(16)}, default=0))
        violations = 0
        checked = 0
        for machine_name, bound_name, uses_oracle in (
            ("ap.otm", "ap_bound.sop", True),
            ("ffx.otm", "ffx_bound.sop", True),
            ("inc.otm", "inc_bound.sop", False),
        ):
            machine = parse_machine(fixture_text(machine_name))
            bound = parse_sop(fixture_text(bound_name))
            if uses_oracle:
                samples = [([f], [x]) for f in oracle_pool for x in range(256)]
            else:
                samples = [([], [x]) for x in range(256)]
            report = check_time_bound(machine, bound, samples)
            checked += report.checked
            violations += (
                len(report.time_violations)
                + len(report.tape_violations)
                + len(report.protocol_violations)
            )
        return violations == 0, f"{checked} monitored runs, {violations} violations"

    return _timed(7, "otm-time-bounds", check)


def criterion_8_regularization() -> CriterionResult:
    def check() -> tuple[bool, str]:
        rng = random.Random(0x8E6)
        violations = 0
        for i in range(200):
            poly = generators.random_sop(rng)
            reg = regularize(poly)
            if not is_regular(reg) or depth(reg) != depth(poly):
                violations += 1
                continue
            for _ in range(1000):
                env = generators.random_sop_env(rng)
                if sop_eval(reg, env) < sop_eval(poly, env):
                    violations += 1
                    break
        return violations == 0, f"200 polynomials x 1000 environments, {violations} violations"

    return _timed(8, "regularization", check)


ALL_CRITERIA: list[Callable[[], CriterionResult]] = [
    criterion_1_witness_biconditional,
    criterion_2_kstar_equivalence,
    criterion_3_mlrn_construction,
    criterion_4_pbrpl_clocked,
    criterion_5_majorization,
    criterion_6_otm_protocol_and_costs,
    criterion_7_time_bounds,
    criterion_8_regularization,
]

TIME_LIMITS = {1: 60.0, 2: 5.0, 3: 60.0, 4: 30.0, 5: 120.0, 6: 30.0, 7: 60.0, 8: 30.0}


def run_all(
    only: Optional[set[int]] = None, out: Callable[[str], None] = print
) -> list[CriterionResult]:
    results = []
    for number, fn in enumerate(ALL_CRITERIA, start=1):
        if only is not None and number not in only:
            continue
        result = fn()
        results.append(result)
        out(result.line())
    return results
