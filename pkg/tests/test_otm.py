import pytest

from bfflab.errors import FuelExhausted, MachineParseError
from bfflab.fixture_access import fixture_text
from bfflab.formats import parse_sop
from bfflab.otm import (
    check_time_bound,
    initial_configuration,
    parse_machine,
    run,
    step,
)
from bfflab.sop import Const
from bfflab.terms import Oracle, bitlen

AP = parse_machine(fixture_text("ap.otm"))
FFX = parse_machine(fixture_text("ffx.otm"))
INC = parse_machine(fixture_text("inc.otm"))
HALT = parse_machine(fixture_text("halt.otm"))


def test_parse_bundled_ap_machine():
    assert AP.oracle_count == 1
    assert AP.initial == "copy"
    assert AP.query_states == {"ask": 0}


def test_parse_rejects_overlapping_transitions():
    text = fixture_text("ap.otm") + "\n(copy, 0 * * *) -> (* 1 * *, R R S S, copy)\n"
    with pytest.raises(MachineParseError) as err:
        parse_machine(text)
    assert any("overlaps" in p for p in err.value.problems)


def test_parse_rejects_write_to_oracle_output():
    text = fixture_text("ap.otm") + "\n(done, * * * *) -> (* * 1 *, S S S S, done)\n"
    with pytest.raises(MachineParseError) as err:
        parse_machine(text)
    assert any("read-only" in p for p in err.value.problems)


def test_parse_rejects_read_of_oracle_input():
    text = fixture_text("ap.otm") + "\n(done, * 1 * *) -> (* * * *, S S S S, done)\n"
    with pytest.raises(MachineParseError) as err:
        parse_machine(text)
    assert any("write-only" in p for p in err.value.problems)


def test_parse_reports_line_numbers():
    with pytest.raises(MachineParseError) as err:
        parse_machine("states: a\nbogus line here\n")
    assert any(p.startswith("line 2:") for p in err.value.problems)


# ---------------------------------------------------------------------------
# stepping and the oracle protocol


def test_query_step_protocol_on_ap():
    f = Oracle({3: 5})
    config = initial_configuration(AP, [3])
    # two copy steps, then the step entering the query state
    for _ in range(3):
        step(AP, config, [f])
    assert config.state == "ask"
    assert config.queries == 1
    out = config.tapes[AP.tape_index("oracle-out", 0)]
    assert "".join(out.cells) == "101"
    assert out.head == 0
    tin = config.tapes[AP.tape_index("oracle-in", 0)]
    assert tin.occupied() == 0 and tin.head == 0
    assert config.query_log == [(0, 3, 5)]


def test_plain_step_costs_one_in_both_models():
    f = Oracle({3: 5})
    config = initial_configuration(AP, [3])
    step(AP, config, [f])
    assert config.steps == 1 and config.length_cost == 1


def test_query_answer_zero_is_free_under_length_cost():
    f = Oracle({}, default=0)
    result = run(AP, [f], [3])
    assert result.output == 0
    assert result.t_len == result.t_unit - 1  # one query, |0| = 0
    out_then = run(AP, [f], [3])
    assert out_then.queries == 1


def test_run_ap_fixture():
    f = Oracle({3: 5})
    result = run(AP, [f], [3])
    assert result.output == 5
    assert result.t_unit == bitlen(3) + bitlen(5) + 2 == 7
    assert result.t_len == result.t_unit - 1 + bitlen(5)


def test_run_immediate_halt():
    result = run(HALT, [], [0])
    assert result.output == 0
    assert result.t_unit == 1


def test_missing_transition_reject_halts():
    machine = parse_machine(
        "states: a b\ntapes: input output\ninit: a\nhalt: b\ndelta:\n"
        "(a, 1 *) -> (* 1, R R, a)\n"
    )
    result = run(machine, [], [2])  # input 10: second symbol 0 has no rule
    assert result.rejected


def test_fuel_exhaustion():
    machine = parse_machine(
        "states: a b\ntapes: input output\ninit: a\nhalt: b\ndelta:\n"
        "(a, * *) -> (* *, S S, a)\n"
    )
    with pytest.raises(FuelExhausted):
        run(machine, [], [1], fuel=50)


# ---------------------------------------------------------------------------
# extensional agreement with direct computation


def test_ap_agrees_with_oracle_on_all_small_inputs():
    f = Oracle({i: (i * i + 3) % 200 for i in range(300)}, default=9)
    for x in range(256):
        assert run(AP, [f], [x]).output == f.peek(x)


def test_ffx_agrees_with_double_application():
    f = Oracle({i: (5 * i + 1) % 256 for i in range(256)}, default=0)
    for x in range(256):
        assert run(FFX, [f], [x]).output == f.peek(f.peek(x))


def test_inc_agrees_with_addition():
    for x in range(256):
        assert run(INC, [], [x]).output == x + 1


def test_cost_identity_on_every_run():
    f = Oracle({i: (7 * i) % 90 for i in range(90)}, default=2)
    for machine, oracles in ((AP, [f]), (FFX, [f]), (INC, [])):
        for x in (0, 1, 5, 100, 255):
            result = run(machine, oracles, [x])
            total_answer_len = result.kc_oracle_cost
            assert result.t_len == result.t_unit - result.queries + total_answer_len


# ---------------------------------------------------------------------------
# time-bound checking


def samples_for(machine, oracle_values, inputs):
    out = []
    for x in inputs:
        if machine.oracle_count:
            out.append(([Oracle(oracle_values, default=0)], [x]))
        else:
            out.append(([], [x]))
    return out


def test_ap_fixture_bound_holds():
    bound = parse_sop(fixture_text("ap_bound.sop"))
    table = {i: (i * 13 + 1) % 256 for i in range(16)}
    report = check_time_bound(AP, bound, samples_for(AP, table, range(64)))
    assert report.ok
    assert report.checked == 64


def test_ap_with_tiny_bound_reports_violation():
    report = check_time_bound(AP, Const(1), samples_for(AP, {3: 5}, [3]))
    assert report.time_violations
    assert not report.tape_violations


def test_immediate_halt_satisfies_constant_bound():
    report = check_time_bound(HALT, Const(1), [([], [0]), ([], [7])])
    assert report.ok


def test_inc_fixture_bound_holds():
    bound = parse_sop(fixture_text("inc_bound.sop"))
    report = check_time_bound(INC, bound, [([], [x]) for x in range(256)])
    assert report.ok


def test_ffx_fixture_bound_holds():
    bound = parse_sop(fixture_text("ffx_bound.sop"))
    table = {i: (i * 7 + 2) % 256 for i in range(16)}
    report = check_time_bound(FFX, bound, samples_for(FFX, table, range(64)))
    assert report.ok


def test_multiple_inputs_on_one_tape():
    # inputs separated by one blank; ap only reads the first numeral
    f = Oracle({3: 5})
    assert run(AP, [f], [3, 9]).output == 5


def test_determinism_identical_runs():
    f = Oracle({i: i + 1 for i in range(16)}, default=0)
    r1 = run(FFX, [f], [7])
    r2 = run(FFX, [f], [7])
    assert (r1.output, r1.t_unit, r1.t_len, r1.query_log) == (
        r2.output,
        r2.t_unit,
        r2.t_len,
        r2.query_log,
    )


def test_query_with_zero_answer_leaves_zero_numeral():
    f = Oracle({}, default=0)
    config = initial_configuration(AP, [3])
    for _ in range(3):
        step(AP, config, [f])
    out = config.tapes[AP.tape_index("oracle-out", 0)]
    assert "".join(out.cells) == "0"
    assert config.length_cost == config.steps - 1  # |0| = 0 replaces the unit


MALFORMED = """
states: a b c q done
tapes: input oracle-in:0 oracle-out:0 output
init: a
halt: done
query: 0 q
delta:
(a, * * * *) -> (* 1 * *, S R S S, b)
(b, * * * *) -> (* * * *, S R S S, c)
(c, * * * *) -> (* 1 * *, S S S S, q)
(q, * * * *) -> (* * * *, S S S S, done)
"""


def test_interleaved_blank_oracle_input_reads_zero_and_flags():
    machine = parse_machine(MALFORMED)
    f = Oracle({0: 9}, default=0)
    result = run(machine, [f], [0])
    assert result.malformed_inputs  # flagged
    assert result.query_log == [(0, 0, 9)]  # read as x = 0


def test_interleaved_blank_oracle_input_strict_mode_raises():
    from bfflab.errors import MalformedOracleInput

    machine = parse_machine(MALFORMED)
    with pytest.raises(MalformedOracleInput):
        run(machine, [Oracle({}, 0)], [0], strict_oracle_input=True)
