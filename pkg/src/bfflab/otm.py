"""Multi-tape oracle Turing machines under two cost conventions.

Machines follow the oracle-tape protocol: each oracle owns a write-only
input tape and a read-only output tape.  A step that moves the machine
into a query state for oracle j (from a different state; staying inside
the state does not re-query) is charged like any other step, and
additionally, atomically: the oracle input tape j is read as a binary
numeral x, the numeral of f_j(x) replaces the content of oracle output
tape j, the input tape is erased, and both tape heads return to cell 0.
Unit cost charges every step (queries included) one unit; length cost
charges a query step |f_j(x)| instead of one.

Machine description format (sections in any order, '#' starts a comment):

    states: copy ask done
    tapes: input oracle-in:0 oracle-out:0 output
    init: copy
    halt: done
    query: 0 ask
    delta:
    (copy, 0 * * *) -> (* 0 * *, R R S S, copy)

Tape kinds on the `tapes:` line are `input`, `work`, `output`,
`oracle-in:J` and `oracle-out:J`, one token per tape in vector order;
exactly one input and one output tape, and a matched in/out pair per
oracle, are required.  A transition lists one read symbol per tape (`*`
matches anything), one write symbol per tape (`*` keeps the cell), one
move per tape (L, R, S; moving left of cell 0 stays), and the next state.
Reads on oracle input tapes and writes on oracle output tapes must be `*`.
Overlapping transitions for one state are rejected at load time.

Numerals on tapes are written most significant bit first with no leading
zeros, except that the value 0 is written as the single symbol `0`; an
empty tape also reads as 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    FuelExhausted,
    MachineParseError,
    MalformedOracleInput,
    NormCapExceeded,
)
from . import sop as sop_mod
from .sop import Sop, SopEnv, norm, sop_eval
from .terms import Oracle, bitlen

BLANK = "_"
WILD = "*"
MOVES = {"L": -1, "R": 1, "S": 0}

KIND_INPUT = "input"
KIND_WORK = "work"
KIND_OUTPUT = "output"
KIND_ORACLE_IN = "oracle-in"
KIND_ORACLE_OUT = "oracle-out"


@dataclass(frozen=True)
class TapeDecl:
    name: str
    kind: str
    oracle: Optional[int] = None


@dataclass(frozen=True)
class Transition:
    state: str
    reads: tuple[str, ...]
    writes: tuple[str, ...]
    moves: tuple[str, ...]
    target: str
    line: int


@dataclass
class Machine:
    states: list[str]
    tapes: list[TapeDecl]
    initial: str
    halting: set[str]
    query_states: dict[str, int]  # state name -> oracle index
    transitions: list[Transition]

    @property
    def oracle_count(self) -> int:
        return len({d.oracle for d in self.tapes if d.kind == KIND_ORACLE_IN})

    def tape_index(self, kind: str, oracle: Optional[int] = None) -> int:
        for i, d in enumerate(self.tapes):
            if d.kind == kind and d.oracle == oracle:
                return i
        raise KeyError((kind, oracle))

    def transitions_from(self, state: str) -> list[Transition]:
        return [t for t in self.transitions if t.state == state]


def _patterns_overlap(a: Sequence[str], b: Sequence[str]) -> bool:
    return all(x == WILD or y == WILD or x == y for x, y in zip(a, b))


def parse_machine(text: str) -> Machine:
    """Parse a machine description; raises MachineParseError listing every
    problem found, each prefixed with its line number."""
    problems: list[str] = []
    states: list[str] = []
    tape_decls: list[TapeDecl] = []
    initial: Optional[str] = None
    halting: set[str] = set()
    query_states: dict[str, int] = {}
    raw_transitions: list[tuple[int, str]] = []

    in_delta = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_delta:
            raw_transitions.append((lineno, line))
            continue
        if line == "delta:":
            in_delta = True
            continue
        if line.startswith("states:"):
            states = line[len("states:"):].split()
        elif line.startswith("tapes:"):
            work_count = 0
            for tok in line[len("tapes:"):].split():
                if tok == KIND_INPUT or tok == KIND_OUTPUT:
                    tape_decls.append(TapeDecl(tok, tok))
                elif tok == KIND_WORK:
                    name = KIND_WORK if work_count == 0 else f"{KIND_WORK}{work_count + 1}"
                    tape_decls.append(TapeDecl(name, KIND_WORK))
                    work_count += 1
                elif tok.startswith((KIND_ORACLE_IN + ":", KIND_ORACLE_OUT + ":")):
                    kind, _, num = tok.partition(":")
                    try:
                        tape_decls.append(TapeDecl(tok, kind, int(num)))
                    except ValueError:
                        problems.append(f"line {lineno}: bad oracle tape {tok!r}")
                else:
                    problems.append(f"line {lineno}: unknown tape kind {tok!r}")
        elif line.startswith("init:"):
            initial = line[len("init:"):].strip()
        elif line.startswith("halt:"):
            halting.update(line[len("halt:"):].split())
        elif line.startswith("query:") or line.startswith("query "):
            body = line.partition(":")[2] if ":" in line else line[len("query"):]
            parts = body.split()
            if len(parts) != 2 or not parts[0].isdigit():
                problems.append(f"line {lineno}: query line needs '<oracle> <state>'")
            else:
                query_states[parts[1]] = int(parts[0])
        else:
            problems.append(f"line {lineno}: unrecognized section {line!r}")

    if not states:
        problems.append("missing states: section")
    if initial is None:
        problems.append("missing init: section")
    elif states and initial not in states:
        problems.append(f"init state {initial!r} not declared")
    for s in sorted(halting):
        if states and s not in states:
            problems.append(f"halt state {s!r} not declared")
    for s in query_states:
        if states and s not in states:
            problems.append(f"query state {s!r} not declared")

    n_input = sum(1 for d in tape_decls if d.kind == KIND_INPUT)
    n_output = sum(1 for d in tape_decls if d.kind == KIND_OUTPUT)
    if n_input != 1:
        problems.append(f"need exactly one input tape, found {n_input}")
    if n_output != 1:
        problems.append(f"need exactly one output tape, found {n_output}")
    ins = sorted(d.oracle for d in tape_decls if d.kind == KIND_ORACLE_IN)
    outs = sorted(d.oracle for d in tape_decls if d.kind == KIND_ORACLE_OUT)
    if ins != outs or ins != list(range(len(ins))):
        problems.append(f"oracle tapes must pair up from index 0: in={ins} out={outs}")
    for j in query_states.values():
        if j not in ins:
            problems.append(f"query state references missing oracle {j}")

    transitions: list[Transition] = []
    n = len(tape_decls)
    for lineno, line in raw_transitions:
        try:
            left, right = line.split("->")
            lstate, _, lreads = left.strip().strip("()").partition(",")
            rparts = right.strip().strip("()").split(",")
            if len(rparts) != 3:
                raise ValueError
            reads = tuple(lreads.split())
            writes = tuple(rparts[0].split())
            moves = tuple(rparts[1].split())
            target = rparts[2].strip()
            state = lstate.strip()
        except ValueError:
            problems.append(f"line {lineno}: malformed transition")
            continue
        if len(reads) != n or len(writes) != n or len(moves) != n:
            problems.append(
                f"line {lineno}: expected {n} read/write/move entries"
            )
            continue
        if states and state not in states:
            problems.append(f"line {lineno}: unknown state {state!r}")
        if states and target not in states:
            problems.append(f"line {lineno}: unknown target state {target!r}")
        bad_move = [m for m in moves if m not in MOVES]
        if bad_move:
            problems.append(f"line {lineno}: bad move {bad_move[0]!r}")
        for i, d in enumerate(tape_decls):
            if d.kind == KIND_ORACLE_IN and reads[i] != WILD:
                problems.append(
                    f"line {lineno}: oracle input tape {d.name} is write-only"
                )
            if d.kind == KIND_ORACLE_OUT and writes[i] != WILD:
                problems.append(
                    f"line {lineno}: oracle output tape {d.name} is read-only"
                )
        transitions.append(Transition(state, reads, writes, moves, target, lineno))

    by_state: dict[str, list[Transition]] = {}
    for t in transitions:
        for other in by_state.get(t.state, []):
            if _patterns_overlap(t.reads, other.reads):
                problems.append(
                    f"line {t.line}: overlaps transition at line {other.line} "
                    f"for state {t.state!r}"
                )
        by_state.setdefault(t.state, []).append(t)

    if problems:
        raise MachineParseError(problems)
    return Machine(
        states=states,
        tapes=tape_decls,
        initial=initial,
        halting=halting,
        query_states=query_states,
        transitions=transitions,
    )


# ---------------------------------------------------------------------------
# Tapes and configurations


class Tape:
    __slots__ = ("cells", "head")

    def __init__(self):
        self.cells: list[str] = []
        self.head = 0

    def read(self) -> str:
        return self.cells[self.head] if self.head < len(self.cells) else BLANK

    def write(self, sym: str) -> None:
        while self.head >= len(self.cells):
            self.cells.append(BLANK)
        self.cells[self.head] = sym

    def move(self, direction: str) -> None:
        self.head = max(0, self.head + MOVES[direction])

    def erase(self) -> None:
        self.cells = []
        self.head = 0

    def occupied(self) -> int:
        """Index just past the rightmost non-blank cell."""
        for i in range(len(self.cells) - 1, -1, -1):
            if self.cells[i] != BLANK:
                return i + 1
        return 0

    def set_numeral(self, value: int) -> None:
        self.cells = list(format(value, "b"))
        self.head = 0

    def read_numeral(self) -> tuple[int, bool]:
        """Value encoded on the tape and a malformed flag (interleaved
        blanks or non-bit symbols read as 0, flagged)."""
        end = self.occupied()
        body = self.cells[:end]
        if not body:
            return 0, False
        if any(c not in "01" for c in body):
            return 0, True
        return int("".join(body), 2), False


@dataclass
class Configuration:
    state: str
    tapes: list[Tape]
    steps: int = 0  # unit-cost time
    length_cost: int = 0
    queries: int = 0
    kc_oracle_cost: int = 0
    query_log: list[tuple[int, int, int]] = field(default_factory=list)
    max_oracle_input_len: dict[int, int] = field(default_factory=dict)
    peak_occupancy: list[int] = field(default_factory=list)
    malformed_inputs: list[int] = field(default_factory=list)
    halted: bool = False
    rejected: bool = False

    def note_occupancy(self):
        for i, tape in enumerate(self.tapes):
            occ = tape.occupied()
            if occ > self.peak_occupancy[i]:
                self.peak_occupancy[i] = occ


def initial_configuration(
    machine: Machine, inputs: Sequence[int]
) -> Configuration:
    tapes = [Tape() for _ in machine.tapes]
    input_tape = tapes[machine.tape_index(KIND_INPUT)]
    cells: list[str] = []
    for i, v in enumerate(inputs):
        if i:
            cells.append(BLANK)
        cells.extend(format(v, "b"))
    input_tape.cells = cells
    config = Configuration(state=machine.initial, tapes=tapes)
    config.peak_occupancy = [t.occupied() for t in tapes]
    config.halted = machine.initial in machine.halting
    return config


def step(
    machine: Machine,
    config: Configuration,
    oracles: Sequence[Oracle],
    strict_oracle_input: bool = False,
) -> Configuration:
    """Advance one step (the query protocol fires on entering a query
    state).  A missing transition reject-halts."""
    if config.halted:
        return config
    reads = tuple(t.read() for t in config.tapes)
    found = None
    for t in machine.transitions_from(config.state):
        if _patterns_overlap(t.reads, reads):
            found = t
            break
    if found is None:
        config.halted = True
        config.rejected = True
        return config
    for tape, read, write, move in zip(config.tapes, reads, found.writes, found.moves):
        if write != WILD:
            tape.write(write)
        tape.move(move)
    config.steps += 1
    config.length_cost += 1
    previous = config.state
    config.state = found.target

    j = machine.query_states.get(found.target)
    if j is not None and found.target != previous:
        tape_in = config.tapes[machine.tape_index(KIND_ORACLE_IN, j)]
        tape_out = config.tapes[machine.tape_index(KIND_ORACLE_OUT, j)]
        x, malformed = tape_in.read_numeral()
        if malformed:
            if strict_oracle_input:
                raise MalformedOracleInput(
                    f"oracle {j} input tape at step {config.steps}"
                )
            config.malformed_inputs.append(config.steps)
        answer = oracles[j].query(x)
        config.query_log.append((j, x, answer))
        config.max_oracle_input_len[j] = max(
            config.max_oracle_input_len.get(j, 0), bitlen(x)
        )
        tape_out.set_numeral(answer)
        tape_in.erase()
        config.queries += 1
        config.kc_oracle_cost += bitlen(answer)
        config.length_cost += bitlen(answer) - 1  # replaces the unit charge
    config.note_occupancy()
    if config.state in machine.halting:
        config.halted = True
    return config


@dataclass
class RunResult:
    output: int
    t_unit: int
    t_len: int
    queries: int
    kc_oracle_cost: int
    halted: bool
    rejected: bool
    output_malformed: bool
    peak_occupancy: dict[str, int]
    query_log: list[tuple[int, int, int]]
    malformed_inputs: list[int]


def run(
    machine: Machine,
    oracles: Sequence[Oracle],
    inputs: Sequence[int],
    fuel: int = 100_000,
    strict_oracle_input: bool = False,
    watcher=None,
) -> RunResult:
    """Run to halt; raises FuelExhausted beyond `fuel` steps.  `watcher`,
    if given, is called with the configuration after every step."""
    config = initial_configuration(machine, inputs)
    if watcher is not None:
        watcher(config)
    while not config.halted:
        if config.steps >= fuel:
            raise FuelExhausted(f"machine ran for {fuel} steps without halting")
        step(machine, config, oracles, strict_oracle_input)
        if watcher is not None:
            watcher(config)
    out_tape = config.tapes[machine.tape_index(KIND_OUTPUT)]
    output, malformed = out_tape.read_numeral()
    return RunResult(
        output=output,
        t_unit=config.steps,
        t_len=config.length_cost,
        queries=config.queries,
        kc_oracle_cost=config.kc_oracle_cost,
        halted=config.halted,
        rejected=config.rejected,
        output_malformed=malformed,
        peak_occupancy={
            d.name: config.peak_occupancy[i] for i, d in enumerate(machine.tapes)
        },
        query_log=list(config.query_log),
        malformed_inputs=list(config.malformed_inputs),
    )


# ---------------------------------------------------------------------------
# Time-bound and tape-monitor checking


@dataclass
class TimeBoundReport:
    checked: int = 0
    skipped_norm_cap: int = 0
    time_violations: list = field(default_factory=list)
    tape_violations: list = field(default_factory=list)
    protocol_violations: list = field(default_factory=list)
    samples: list = field(default_factory=list)  # (inputs, t_unit, bound)

    @property
    def ok(self) -> bool:
        return not (
            self.time_violations or self.tape_violations or self.protocol_violations
        )


def check_time_bound(
    machine: Machine,
    bound: Sop,
    samples: Iterable[tuple[Sequence[Oracle], Sequence[int]]],
    fuel: int = 100_000,
    norm_cap: int = sop_mod.DEFAULT_NORM_CAP,
) -> TimeBoundReport:
    """Check unit-cost running time against the polynomial and the tape
    monitors on every sample.

    At every step: work and oracle-input tapes may hold at most
    (steps so far + input length) symbols; each oracle output tape may
    hold a numeral no longer than the oracle's norm at the longest input
    queried so far; after a query the oracle input tape is empty and both
    oracle tape heads rest at cell 0.
    """
    report = TimeBoundReport()
    monitored = [
        (i, d) for i, d in enumerate(machine.tapes) if d.kind in (KIND_WORK, KIND_ORACLE_IN)
    ]
    out_tapes = [
        (i, d) for i, d in enumerate(machine.tapes) if d.kind == KIND_ORACLE_OUT
    ]
    for oracles, inputs in samples:
        env = SopEnv([bitlen(v) for v in inputs], oracles, norm_cap)
        try:
            limit = sop_eval(bound, env)
        except NormCapExceeded:
            report.skipped_norm_cap += 1
            continue

        input_len = sum(bitlen(v) for v in inputs) + max(0, len(inputs) - 1)
        prev_queries = 0
        failures: list[tuple] = []

        def watch(config: Configuration):
            nonlocal prev_queries
            for i, d in monitored:
                occ = config.tapes[i].occupied()
                if occ > config.steps + input_len:
                    failures.append(("tape", tuple(inputs), d.name, config.steps, occ))
            for i, d in out_tapes:
                value, _ = config.tapes[i].read_numeral()
                max_in = config.max_oracle_input_len.get(d.oracle, 0)
                try:
                    allowed = norm(oracles[d.oracle], max_in, norm_cap)
                except NormCapExceeded:
                    continue
                if bitlen(value) > allowed:
                    failures.append(
                        ("oracle-out", tuple(inputs), d.name, config.steps, bitlen(value))
                    )
            if config.queries > prev_queries:
                prev_queries = config.queries
                for j in range(machine.oracle_count):
                    tin = config.tapes[machine.tape_index(KIND_ORACLE_IN, j)]
                    tout = config.tapes[machine.tape_index(KIND_ORACLE_OUT, j)]
                    if tin.occupied() != 0 or tin.head != 0 or tout.head != 0:
                        failures.append(
                            ("protocol", tuple(inputs), j, config.steps)
                        )

        result = run(machine, oracles, inputs, fuel=fuel, watcher=watch)
        report.checked += 1
        report.samples.append((tuple(inputs), result.t_unit, limit))
        for f in failures:
            if f[0] == "protocol":
                report.protocol_violations.append(f)
            else:
                report.tape_violations.append(f)
        if result.t_unit > limit:
            report.time_violations.append((tuple(inputs), result.t_unit, limit))
    return report
