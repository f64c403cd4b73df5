"""Command-line front end.

Subcommands: eval, bound infer|check, sop depth|regularize|witness|
witness-check, scheme mlrn-run|pbrn-run|pbrpl-run|pbrpl-validate,
otm run|check, selftest.  Reports are line-oriented key<TAB>value text
with all lists sorted, so identical invocations produce identical bytes.
Exit codes: 0 success, 1 a domain violation was found or raised, 2 usage
or parse errors (diagnostics on stderr only).

The environment variable BFFLAB_NORM_CAP overrides the norm cap used when
evaluating polynomials that apply oracle norms.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import acceptance, plots
from .bounds import check_majorization, infer_bound, sample_inputs
from .errors import BffError, MachineParseError, SexprError
from .formats import (
    parse_oracle,
    parse_scheme,
    parse_sop,
    parse_term,
    sop_to_sexpr,
    term_to_sexpr,
)
from . import otm as otm_mod
from . import sop as sop_mod
from .schemes import (
    PbrplTrace,
    compile_mlrn,
    eval_pbrn,
    eval_pbrpl_clocked,
    validate_pbrpl,
)
from .sop import depth, regularize, witness_check, witness_terms
from .terms import CostLedger, Oracle, ensure_valid, eval_term

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


class UsageFailure(Exception):
    pass


def norm_cap() -> int:
    raw = os.environ.get("BFFLAB_NORM_CAP")
    if raw is None:
        return sop_mod.DEFAULT_NORM_CAP
    try:
        return int(raw)
    except ValueError:
        raise UsageFailure(f"BFFLAB_NORM_CAP must be an integer, got {raw!r}")


def read_file(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise UsageFailure(str(err))


def load_term(path: str):
    try:
        return parse_term(read_file(path))
    except SexprError as err:
        raise UsageFailure(f"{path}: {err}")


def load_sop(path: str):
    try:
        return parse_sop(read_file(path))
    except SexprError as err:
        raise UsageFailure(f"{path}: {err}")


def load_oracles(paths) -> list[Oracle]:
    out = []
    for p in paths or []:
        try:
            out.append(parse_oracle(read_file(p)))
        except SexprError as err:
            raise UsageFailure(f"{p}: {err}")
    return out


def load_machine(path: str):
    try:
        return otm_mod.parse_machine(read_file(path))
    except MachineParseError as err:
        raise UsageFailure(f"{path}:\n{err}")


def load_scheme(path: str, expect: str):
    try:
        kind, payload = parse_scheme(read_file(path))
    except SexprError as err:
        raise UsageFailure(f"{path}: {err}")
    if kind != expect:
        raise UsageFailure(f"{path}: expected a {expect} scheme, found {kind}")
    return payload


def to_nats(values) -> list[int]:
    out = []
    for v in values or []:
        try:
            n = int(v)
        except ValueError:
            raise UsageFailure(f"arguments must be naturals, got {v!r}")
        if n < 0:
            raise UsageFailure(f"arguments must be naturals, got {v!r}")
        out.append(n)
    return out


def emit(key, value):
    print(f"{key}\t{value}")


# ---------------------------------------------------------------------------
# subcommand handlers (each returns an exit code)


def cmd_eval(args) -> int:
    term = load_term(args.term)
    oracles = load_oracles(args.oracle)
    values = to_nats(args.args)
    ensure_valid(term, (len(oracles), len(values)))
    ledger = CostLedger()
    result = eval_term(
        term,
        oracles,
        values,
        ledger=ledger,
        fuel=args.fuel,
        bound_mode="strict" if args.strict else "clamp",
    )
    if args.report:
        emit("value", result)
        emit("builtin_steps", ledger.builtin_steps)
        emit("oracle_queries", ledger.oracle_queries)
        emit("kc_oracle_cost", ledger.kc_oracle_cost)
        emit("peak_value_bits", ledger.peak_value_bits)
    else:
        print(result)
    return EXIT_OK


def cmd_bound_infer(args) -> int:
    print(sop_to_sexpr(infer_bound(load_term(args.term))))
    return EXIT_OK


def cmd_bound_check(args) -> int:
    term = load_term(args.term)
    bound = load_sop(args.sop)
    from .sop import len_vars, norm_vars
    from .terms import rank as term_rank

    k, l = term_rank(term)
    k = max([k] + [j + 1 for j in norm_vars(bound)])
    l = max([l] + [i + 1 for i in len_vars(bound)])
    rng = random.Random(args.seed)
    samples = sample_inputs((k, l), args.samples, rng, max_arg_bits=args.max_arg_bits)
    report = check_majorization(term, bound, samples, norm_cap=norm_cap())
    emit("checked", report.checked)
    emit("skipped_norm_cap", report.skipped_norm_cap)
    emit("violations", len(report.violations))
    for oracles_desc, sample_args, value_bits, limit in sorted(report.violations):
        emit("violation", f"args={list(sample_args)} |value|={value_bits} bound={limit}")
    if args.plot_dir:
        emit("figure", plots.majorization_figure(report, args.plot_dir))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_sop_depth(args) -> int:
    print(depth(load_sop(args.sop)))
    return EXIT_OK


def cmd_sop_regularize(args) -> int:
    print(sop_to_sexpr(regularize(load_sop(args.sop))))
    return EXIT_OK


def cmd_sop_witness(args) -> int:
    poly = load_sop(args.sop)
    for term in witness_terms(poly):
        print(term_to_sexpr(term))
    return EXIT_OK


def cmd_sop_witness_check(args) -> int:
    poly = load_sop(args.sop)
    if args.terms:
        from .formats import read_sexprs, term_from_node

        witness = [term_from_node(n) for n in read_sexprs(read_file(args.terms))]
    else:
        witness = witness_terms(poly)
    oracles = load_oracles(args.oracle)
    values = to_nats(args.args)
    report = witness_check(
        poly, witness, oracles, values, range(args.u_max + 1), norm_cap=norm_cap()
    )
    emit("polynomial_value", report.polynomial_value)
    emit("rhs_max", report.rhs_max)
    emit("checked", report.checked)
    emit("disagreements", len(report.disagreements))
    for u, lhs, rhs in sorted(report.disagreements):
        emit("disagreement", f"u={u} lhs={lhs} rhs={rhs}")
    if args.plot_dir:
        emit("figure", plots.witness_figure(report, args.plot_dir))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_scheme_mlrn_run(args) -> int:
    system = load_scheme(args.scheme, "mlrn")
    oracles = load_oracles(args.oracle)
    values = tuple(to_nats(args.args))
    alpha = (tuple(oracles), values)
    evaluators = compile_mlrn(system, mode="strict" if args.strict else "clamp")
    for i, evaluator in enumerate(evaluators, start=1):
        emit(f"f{i}", evaluator(args.u, alpha))
    return EXIT_OK


def cmd_scheme_pbrn_run(args) -> int:
    base, step, bound = load_scheme(args.scheme, "pbrn")
    oracles = load_oracles(args.oracle)
    if len(oracles) != 1:
        raise UsageFailure("pbrn-run takes exactly one --oracle")
    values = to_nats(args.args)
    ensure_valid(base, (1, len(values)))
    ensure_valid(step, (1, len(values) + 2))
    result = eval_pbrn(
        base,
        step,
        bound,
        oracles[0],
        values,
        args.y,
        mode=args.mode,
        norm_cap=norm_cap(),
    )
    print(result)
    return EXIT_OK


def cmd_scheme_pbrpl_run(args) -> int:
    system = load_scheme(args.scheme, "pbrpl")
    oracles = load_oracles(args.oracle)
    if len(oracles) != 1:
        raise UsageFailure("pbrpl-run takes exactly one --oracle")
    values = to_nats(args.args)
    ensure_valid(system.base, (1, len(values)))
    ensure_valid(system.step, (1, len(values) + 2))
    trace = PbrplTrace()
    result = eval_pbrpl_clocked(
        system, oracles[0], values, hard_cap=args.hard_cap, trace=trace
    )
    emit("value", result)
    emit("steps", trace.steps)
    emit("abort", trace.abort)
    emit("queried", " ".join(str(q) for q in sorted(set(trace.queried))))
    return EXIT_OK


def cmd_scheme_pbrpl_validate(args) -> int:
    system = load_scheme(args.scheme, "pbrpl")
    oracles = load_oracles(args.oracle)
    args_list = [to_nats(vec) for vec in args.args or [[]]]
    report = validate_pbrpl(system, oracles, args_list, norm_cap=norm_cap())
    emit("checked_cases", report.checked_cases)
    emit("checked_pairs", report.checked_pairs)
    for key, horizon in sorted(report.horizons.items()):
        emit("horizon", f"oracle={key[0]} args={list(key[1])} checked_to={horizon}")
    emit("value_bound_violations", len(report.value_bound_violations))
    emit("stabilization_violations", len(report.stabilization_violations))
    emit("locality_violations", len(report.locality_violations))
    for row in sorted(map(str, report.value_bound_violations)):
        emit("value_bound_violation", row)
    for row in sorted(map(str, report.stabilization_violations)):
        emit("stabilization_violation", row)
    for row in sorted(map(str, report.locality_violations)):
        emit("locality_violation", row)
    if args.plot_dir:
        emit("figure", plots.pbrpl_figure(report, args.plot_dir))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_otm_run(args) -> int:
    machine = load_machine(args.machine)
    oracles = load_oracles(args.oracle)
    if len(oracles) != machine.oracle_count:
        raise UsageFailure(
            f"machine uses {machine.oracle_count} oracle(s), {len(oracles)} given"
        )
    inputs = to_nats(args.input)
    result = otm_mod.run(machine, oracles, inputs, fuel=args.fuel)
    emit("output", result.output)
    emit("cost", result.t_unit if args.cost == "unit" else result.t_len)
    emit("t_unit", result.t_unit)
    emit("t_len", result.t_len)
    emit("queries", result.queries)
    emit("rejected", str(result.rejected).lower())
    for name, peak in sorted(result.peak_occupancy.items()):
        emit("peak", f"{name}={peak}")
    return EXIT_OK


def cmd_otm_check(args) -> int:
    machine = load_machine(args.machine)
    bound = load_sop(args.bound)
    rng = random.Random(args.seed)
    samples = []
    for _ in range(args.samples):
        oracles = [
            Oracle(
                {i: rng.randrange(256) for i in range(16)},
                default=rng.randrange(2),
            )
            for _ in range(machine.oracle_count)
        ]
        inputs = [rng.randrange(args.max_input)]
        samples.append((oracles, inputs))
    report = check_time_bound_wrapper(machine, bound, samples, args)
    emit("checked", report.checked)
    emit("skipped_norm_cap", report.skipped_norm_cap)
    emit("time_violations", len(report.time_violations))
    emit("tape_violations", len(report.tape_violations))
    emit("protocol_violations", len(report.protocol_violations))
    for row in sorted(map(str, report.time_violations + report.tape_violations)):
        emit("violation", row)
    if args.plot_dir:
        emit("figure", plots.time_bound_figure(report, args.plot_dir))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def check_time_bound_wrapper(machine, bound, samples, args):
    return otm_mod.check_time_bound(
        machine, bound, samples, fuel=args.fuel, norm_cap=norm_cap()
    )


def cmd_selftest(args) -> int:
    only = None
    if args.only:
        only = {int(x) for x in args.only.split(",")}
    results = acceptance.run_all(only=only)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageFailure(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="bfflab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a term file")
    p.add_argument("term")
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="*", metavar="N")
    p.add_argument("--fuel", type=int, default=1_000_000)
    p.add_argument("--strict", action="store_true", help="error on bound clamps")
    p.add_argument("--report", action="store_true", help="key/value output with costs")
    p.set_defaults(handler=cmd_eval)

    bound = sub.add_parser("bound", help="majorizing polynomial bounds")
    bsub = bound.add_subparsers(dest="subcommand", required=True)
    p = bsub.add_parser("infer", help="print the inferred bound")
    p.add_argument("term")
    p.set_defaults(handler=cmd_bound_infer)
    p = bsub.add_parser("check", help="sample-check a bound against a term")
    p.add_argument("term")
    p.add_argument("sop")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-arg-bits", type=int, default=6)
    p.add_argument("--plot-dir", metavar="DIR")
    p.set_defaults(handler=cmd_bound_check)

    sopp = sub.add_parser("sop", help="second-order polynomial operations")
    ssub = sopp.add_subparsers(dest="subcommand", required=True)
    p = ssub.add_parser("depth", help="print the application depth")
    p.add_argument("sop")
    p.set_defaults(handler=cmd_sop_depth)
    p = ssub.add_parser("regularize", help="print a regular majorant")
    p.add_argument("sop")
    p.set_defaults(handler=cmd_sop_regularize)
    p = ssub.add_parser("witness", help="print the witness terms")
    p.add_argument("sop")
    p.set_defaults(handler=cmd_sop_witness)
    p = ssub.add_parser("witness-check", help="brute-force the equivalence")
    p.add_argument("sop")
    p.add_argument("--terms", metavar="FILE", help="externally supplied witness terms")
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="*", metavar="N")
    p.add_argument("--u-max", type=int, default=255)
    p.add_argument("--plot-dir", metavar="DIR")
    p.set_defaults(handler=cmd_sop_witness_check)

    scheme = sub.add_parser("scheme", help="recursion-scheme constructions")
    csub = scheme.add_subparsers(dest="subcommand", required=True)
    p = csub.add_parser("mlrn-run", help="run the eliminated simultaneous recursion")
    p.add_argument("scheme")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="*", metavar="N")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(handler=cmd_scheme_mlrn_run)
    p = csub.add_parser("pbrn-run", help="run bounded recursion on notation")
    p.add_argument("scheme")
    p.add_argument("--y", type=int, required=True)
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="*", metavar="N")
    p.add_argument("--mode", choices=["clamp", "strict"], default="clamp")
    p.set_defaults(handler=cmd_scheme_pbrn_run)
    p = csub.add_parser("pbrpl-run", help="run the adaptively clocked recursion")
    p.add_argument("scheme")
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="*", metavar="N")
    p.add_argument("--hard-cap", type=int, default=100_000)
    p.set_defaults(handler=cmd_scheme_pbrpl_run)
    p = csub.add_parser("pbrpl-validate", help="brute-force the side conditions")
    p.add_argument("scheme")
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--args", nargs="+", action="append", metavar="N")
    p.add_argument("--plot-dir", metavar="DIR")
    p.set_defaults(handler=cmd_scheme_pbrpl_validate)

    otm = sub.add_parser("otm", help="oracle Turing machines")
    osub = otm.add_subparsers(dest="subcommand", required=True)
    p = osub.add_parser("run", help="run a machine")
    p.add_argument("machine")
    p.add_argument("--oracle", action="append", metavar="FILE")
    p.add_argument("--input", action="append", required=True, metavar="N")
    p.add_argument("--cost", choices=["unit", "len"], default="unit")
    p.add_argument("--fuel", type=int, default=100_000)
    p.set_defaults(handler=cmd_otm_run)
    p = osub.add_parser("check", help="check a time bound with tape monitors")
    p.add_argument("machine")
    p.add_argument("--bound", required=True, metavar="SOPFILE")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-input", type=int, default=256)
    p.add_argument("--fuel", type=int, default=100_000)
    p.add_argument("--plot-dir", metavar="DIR")
    p.set_defaults(handler=cmd_otm_check)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", metavar="N,M", help="comma-separated criteria numbers")
    p.set_defaults(handler=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageFailure as err:
        print(f"bfflab: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError, KeyError) as err:
        print(f"bfflab: malformed input or mismatched arity: {err}", file=sys.stderr)
        return EXIT_USAGE
    except BffError as err:
        print(f"bfflab: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
