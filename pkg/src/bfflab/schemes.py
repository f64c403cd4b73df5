"""Recursion-scheme constructions over basic feasible functionals.

Three schemes are implemented:

* simultaneous ("multiple") limited recursion on notation, eliminated into
  single recursions by coding the history of the first functional as a
  bounded sequence number (`compile_mlrn`);
* recursion on notation bounded by a second-order polynomial, evaluated
  with a per-step length check (`eval_pbrn`);
* polynomial-length successor recursion, evaluated under an adaptive clock
  that re-approximates the length polynomial from the oracle points queried
  so far and aborts once the step index overtakes the approximation
  (`eval_pbrpl_clocked`).

Sequence numbers use fixed-width blocks, one element per block with a
marker bit on top, so a code of n elements is always below 2^(n*width) and
in particular below the sqbd certificate for its element bound and length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import (
    BoundViolation,
    ElementTooWide,
    IndexOutOfRange,
    NonTermination,
    SearchSpaceTooLarge,
)
from . import sop as sop_mod
from .sop import Sop, SopEnv, sop_eval
from .terms import Oracle, Term, bitlen, eval_term, smash

#: norm arguments are never enumerated for sparse default-0 tables, so the
#: adaptive clock may evaluate its approximation without a practical cap
UNCAPPED_NORM = 1 << 62


def kstar(v: int) -> int:
    """(1 # v) monus 1: the largest number whose length is at most |v|."""
    return (1 << bitlen(v)) - 1


def sqbd(a: int, b: int) -> int:
    """(2b+1) # (4(2a+1)^2): bounds every code of a sequence of at most
    |b|+1 elements each at most a."""
    return smash(2 * b + 1, 4 * (2 * a + 1) ** 2)


# ---------------------------------------------------------------------------
# Sequence coding


@dataclass(frozen=True)
class SequenceCode:
    """Fixed-width coding of a finite sequence as one natural.

    Each element occupies `width` bits: the element value in the low
    width-1 bits and a marker in the top bit, so the payload of n elements
    is below 2^(n*width) and the length is recoverable from the payload.
    """

    width: int
    length: int
    payload: int


def width_for(a_bound: int) -> int:
    return bitlen(a_bound) + 2


def seq_encode(elements: Sequence[int], a_bound: int) -> SequenceCode:
    w = width_for(a_bound)
    cap = (1 << (w - 1)) - 1
    payload = 0
    for i, e in enumerate(elements):
        if e > cap:
            raise ElementTooWide(f"element {e} needs more than {w - 1} bits")
        payload |= (e | (1 << (w - 1))) << (w * i)
    return SequenceCode(width=w, length=len(elements), payload=payload)


def seq_get(code: SequenceCode, i: int) -> int:
    if not 0 <= i < code.length:
        raise IndexOutOfRange(f"index {i} in sequence of length {code.length}")
    return (code.payload >> (code.width * i)) & ((1 << (code.width - 1)) - 1)


def seq_decode(code: SequenceCode) -> list[int]:
    return [seq_get(code, i) for i in range(code.length)]


def seq_append(code: SequenceCode, v: int) -> SequenceCode:
    cap = (1 << (code.width - 1)) - 1
    if v > cap:
        raise ElementTooWide(f"element {v} needs more than {code.width - 1} bits")
    payload = code.payload | ((v | (1 << (code.width - 1))) << (code.width * code.length))
    return SequenceCode(code.width, code.length + 1, payload)


# ---------------------------------------------------------------------------
# Simultaneous limited recursion on notation

Alpha = tuple[tuple[Oracle, ...], tuple[int, ...]]

BaseFn = Callable[[Alpha], int]
StepFn = Callable[[int, tuple[int, ...], Alpha], int]
BoundFn = Callable[[int, tuple[int, ...], Alpha], int]


@dataclass
class MlrnSystem:
    """n functionals defined by one simultaneous recursion on notation.

    bases[i](alpha) gives the value at 0; steps[i](u, prevs, alpha) the
    value at u from all previous values prevs = (F_1..F_n at half u);
    bounds[i](u, earlier, alpha) the limit for functional i, where earlier
    holds the current values of the functionals before it.
    """

    bases: tuple[BaseFn, ...]
    steps: tuple[StepFn, ...]
    bounds: tuple[BoundFn, ...]

    def __post_init__(self):
        if not (len(self.bases) == len(self.steps) == len(self.bounds)):
            raise ValueError("component lists must have equal length")
        if not self.bases:
            raise ValueError("need at least one functional")

    @property
    def size(self) -> int:
        return len(self.bases)

    @staticmethod
    def from_terms(
        base_terms: Sequence[Term],
        step_terms: Sequence[Term],
        bound_terms: Sequence[Term],
    ) -> "MlrnSystem":
        """Wrap terms using the verbatim argument orders: step i takes
        (u, prev_1..prev_n, x...), bound i takes (u, x..., F_1..F_{i-1})."""
        n = len(base_terms)

        def mk_base(t: Term) -> BaseFn:
            return lambda alpha: eval_term(t, alpha[0], alpha[1])

        def mk_step(t: Term) -> StepFn:
            return lambda u, prevs, alpha: eval_term(
                t, alpha[0], (u,) + tuple(prevs) + tuple(alpha[1])
            )

        def mk_bound(t: Term) -> BoundFn:
            return lambda u, earlier, alpha: eval_term(
                t, alpha[0], (u,) + tuple(alpha[1]) + tuple(earlier)
            )

        return MlrnSystem(
            bases=tuple(mk_base(t) for t in base_terms),
            steps=tuple(mk_step(t) for t in step_terms),
            bounds=tuple(mk_bound(t) for t in bound_terms),
        )


def khat(bound1: BoundFn, u: int, alpha: Alpha) -> int:
    """The prefix of u at which bound1 is largest along the halving chain."""
    if u == 0:
        return 0
    p = khat(bound1, u >> 1, alpha)
    if bound1(u, (), alpha) <= bound1(p, (), alpha):
        return p
    return u


def kbar(bound1: BoundFn, u: int, alpha: Alpha) -> int:
    """max of bound1 over all most-significant prefixes of u."""
    return bound1(khat(bound1, u, alpha), (), alpha)


def compile_mlrn(system: MlrnSystem, mode: str = "clamp"):
    """Build evaluators for all functionals of a simultaneous recursion.

    The first functional's history along the halving chain is coded as a
    sequence number bounded by sqbd of the running bound maximum; the
    remaining functionals are rewritten against that code and eliminated
    recursively.  In clamp mode the limiting minima are applied exactly as
    constructed; strict mode raises BoundViolation whenever a minimum
    would actually change a value, which only happens when the supplied
    system violates its own bounds.
    """
    if mode not in ("clamp", "strict"):
        raise ValueError(f"bad mode {mode!r}")
    return _compile(system.bases, system.steps, system.bounds, mode)


def _limited(raw: int, cap: int, where, mode: str) -> int:
    if raw > cap and mode == "strict":
        raise BoundViolation(where, raw, cap)
    return min(raw, cap)


def _compile(bases, steps, bounds, mode):
    if len(bases) == 1:
        base, step, bound = bases[0], steps[0], bounds[0]

        def f_only(u: int, alpha) -> int:
            if u == 0:
                return base(alpha)
            prev = f_only(u >> 1, alpha)
            return _limited(
                step(u, (prev,), alpha), bound(u, (), alpha), u, mode
            )

        return (f_only,)

    base1, step1, bound1 = bases[0], steps[0], bounds[0]

    # the rest of the system, re-read against (alpha, history code)
    def shift_base(g):
        return lambda ext: g(ext[0])

    def shift_step(h):
        def h2(u, prevs, ext):
            alpha, w = ext
            return h(u, (seq_get(w, bitlen(u) - 1),) + tuple(prevs), alpha)

        return h2

    def shift_bound(k):
        def k2(u, earlier, ext):
            alpha, w = ext
            return k(u, (seq_get(w, bitlen(u)),) + tuple(earlier), alpha)

        return k2

    sub = _compile(
        tuple(shift_base(g) for g in bases[1:]),
        tuple(shift_step(h) for h in steps[1:]),
        tuple(shift_bound(k) for k in bounds[1:]),
        mode,
    )

    def history(u: int, alpha) -> SequenceCode:
        limit = kbar(bound1, u, alpha)
        if u == 0:
            first = _limited(base1(alpha), limit, 0, mode)
            return seq_encode([first], limit)
        prev_code = history(u >> 1, alpha)
        p1 = seq_get(prev_code, bitlen(u >> 1))
        rest = tuple(s(u >> 1, (alpha, prev_code)) for s in sub)
        elem = step1(u, (p1,) + rest, alpha)
        seq_cap = sqbd(limit, u)
        recoded = seq_encode(seq_decode(prev_code), limit)
        try:
            appended = seq_append(recoded, elem)
            payload = appended.payload
        except ElementTooWide:
            if mode == "strict":
                raise BoundViolation(u, elem, limit)
            payload = seq_cap
        payload = _limited(payload, seq_cap, u, mode)
        return SequenceCode(recoded.width, recoded.length + 1, payload)

    def f_first(u: int, alpha) -> int:
        return seq_get(history(u, alpha), bitlen(u))

    rest_evals = tuple(
        (lambda s: lambda u, alpha: s(u, (alpha, history(u, alpha))))(s) for s in sub
    )
    return (f_first,) + rest_evals


def direct_mlrn(system: MlrnSystem, mode: str = "clamp"):
    """Reference evaluators by plain simultaneous unfolding (the oracle the
    compiled construction is checked against)."""

    def values(u: int, alpha) -> tuple[int, ...]:
        if u == 0:
            vs = tuple(g(alpha) for g in system.bases)
        else:
            prevs = values(u >> 1, alpha)
            vs = tuple(h(u, prevs, alpha) for h in system.steps)
        out = []
        for i, v in enumerate(vs):
            out.append(
                _limited(v, system.bounds[i](u, tuple(out), alpha), u, mode)
            )
        return tuple(out)

    def make(i):
        return lambda u, alpha: values(u, alpha)[i]

    return tuple(make(i) for i in range(system.size))


# ---------------------------------------------------------------------------
# Recursion on notation bounded by a second-order polynomial

Evaluator2 = Union[Term, Callable]


def _apply_base(base: Evaluator2, f: Oracle, xs: Sequence[int]) -> int:
    if isinstance(base, Term):
        return eval_term(base, [f], tuple(xs))
    return base(f, tuple(xs))


def _apply_step(step: Evaluator2, f: Oracle, xs, prev: int, y: int) -> int:
    if isinstance(step, Term):
        return eval_term(step, [f], tuple(xs) + (prev, y))
    return step(f, tuple(xs), prev, y)


def eval_pbrn(
    base: Evaluator2,
    step: Evaluator2,
    bound: Sop,
    f: Oracle,
    xs: Sequence[int],
    y: int,
    mode: str = "clamp",
    norm_cap: int = sop_mod.DEFAULT_NORM_CAP,
) -> int:
    """Recursion on notation with the bound given as a polynomial over
    (|f|, |x...|, |y|); the step takes (f, x..., previous, y).

    Every intermediate value's length is checked against the bound at the
    current recursion argument: strict mode raises BoundViolation, clamp
    mode limits the value to the largest number of the permitted length.
    """
    if mode not in ("clamp", "strict"):
        raise ValueError(f"bad mode {mode!r}")
    xs = tuple(xs)
    xlens = [bitlen(x) for x in xs]

    def bound_at(u: int) -> int:
        env = SopEnv(xlens + [bitlen(u)], [f], norm_cap)
        return sop_eval(bound, env)

    def check(v: int, u: int) -> int:
        q = bound_at(u)
        if bitlen(v) > q:
            if mode == "strict":
                raise BoundViolation(u, v, q)
            return (1 << q) - 1
        return v

    v = check(_apply_base(base, f, xs), 0)
    for u in [y >> i for i in range(bitlen(y) - 1, -1, -1)]:
        v = check(_apply_step(step, f, xs, v, u), u)
    return v


def naive_recursion_on_notation(
    base: Evaluator2, step: Evaluator2, f: Oracle, xs: Sequence[int], y: int
) -> int:
    """Unbounded unfolding, used as the reference for eval_pbrn."""
    xs = tuple(xs)
    v = _apply_base(base, f, xs)
    for u in [y >> i for i in range(bitlen(y) - 1, -1, -1)]:
        v = _apply_step(step, f, xs, v, u)
    return v


# ---------------------------------------------------------------------------
# Polynomial-length recursion with the adaptive clock


@dataclass
class PbrplSystem:
    """Successor recursion of polynomial length.

    base(f, x...) starts the iteration, step(f, x..., prev, u) advances it;
    length_bound gives the number of steps and value_bound the length of
    every intermediate value, both as polynomials over (|f|, |x...|).
    """

    base: Evaluator2
    step: Evaluator2
    length_bound: Sop
    value_bound: Sop


@dataclass
class PbrplTrace:
    steps: int = 0
    abort: str = ""
    queried: list[int] = field(default_factory=list)
    approximations: list[int] = field(default_factory=list)
    values: list[int] = field(default_factory=list)


def eval_pbrpl_clocked(
    system: PbrplSystem,
    f: Oracle,
    xs: Sequence[int],
    hard_cap: int = 100_000,
    trace: Optional[PbrplTrace] = None,
) -> int:
    """Evaluate the recursion under the adaptive clock.

    After each stage the length polynomial is re-evaluated with the oracle
    replaced by its restriction to the points queried so far (zero
    elsewhere); once the next step index exceeds that approximation the
    recursion is aborted and the current value returned.  Every value's
    length is checked against the value bound under the same substituted
    oracle.  A run that survives hard_cap stages raises NonTermination,
    which signals a violated side condition of the defining scheme.
    """
    xs = tuple(xs)
    xlens = [bitlen(x) for x in xs]
    private = Oracle(f.table, f.default)

    def substituted() -> Oracle:
        return Oracle(
            {z: private.peek(z) for z in private.query_log}, default=0
        )

    def check_value(v: int, stage) -> None:
        q = sop_eval(
            system.value_bound, SopEnv(xlens, [substituted()], UNCAPPED_NORM)
        )
        if bitlen(v) > q:
            raise BoundViolation(stage, v, q)

    v = _apply_base(system.base, private, xs)
    check_value(v, 0)
    if trace is not None:
        trace.values.append(v)
    u = 0
    while True:
        approx = sop_eval(
            system.length_bound, SopEnv(xlens, [substituted()], UNCAPPED_NORM)
        )
        if trace is not None:
            trace.approximations.append(approx)
        if u + 1 > approx:
            if trace is not None:
                trace.steps = u
                trace.abort = "clock"
                trace.queried = list(private.query_log)
            return v
        if u + 1 > hard_cap:
            raise NonTermination(f"clock did not fire within {hard_cap} stages")
        v = _apply_step(system.step, private, xs, v, u)
        u += 1
        check_value(v, u)
        if trace is not None:
            trace.values.append(v)


def eval_pbrpl_unclocked(
    system: PbrplSystem, f: Oracle, xs: Sequence[int], steps: int
) -> int:
    """Plain iteration for the stated number of steps (the reference)."""
    xs = tuple(xs)
    v = _apply_base(system.base, f, xs)
    for u in range(steps):
        v = _apply_step(system.step, f, xs, v, u)
    return v


def length_bound_value(
    system: PbrplSystem,
    f: Oracle,
    xs: Sequence[int],
    norm_cap: int = sop_mod.DEFAULT_NORM_CAP,
) -> int:
    """The length polynomial under the true oracle norms."""
    return sop_eval(
        system.length_bound, SopEnv([bitlen(x) for x in xs], [f], norm_cap)
    )


@dataclass
class PbrplValidationReport:
    checked_cases: int = 0
    checked_pairs: int = 0
    horizons: dict = field(default_factory=dict)
    value_bound_violations: list = field(default_factory=list)
    stabilization_violations: list = field(default_factory=list)
    locality_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.value_bound_violations
            or self.stabilization_violations
            or self.locality_violations
        )


def validate_pbrpl(
    system: PbrplSystem,
    oracles: Sequence[Oracle],
    args_list: Sequence[Sequence[int]],
    norm_cap: int = sop_mod.DEFAULT_NORM_CAP,
    work_cap: int = 5_000_000,
) -> PbrplValidationReport:
    """Brute-force the defining side conditions on a finite domain.

    For every oracle/argument combination: (a) values up to the length
    bound stay within the value bound; (b) the iteration is constant from
    the length bound up to twice the bound plus four (a finite stand-in
    for the universal condition, recorded per case in `horizons`); (c) for
    every oracle pair agreeing on the iteration up to the first one's
    length bound, the iterations agree through the common horizon.
    """
    report = PbrplValidationReport()
    oracles = list(oracles)
    args_list = [tuple(a) for a in args_list]

    traces: dict[tuple[int, tuple[int, ...]], tuple[int, list[int]]] = {}
    budget = 0
    for fi, f in enumerate(oracles):
        for xs in args_list:
            p_val = length_bound_value(system, f, xs, norm_cap)
            horizon = 2 * p_val + 4
            budget += horizon + 1
            if budget > work_cap:
                raise SearchSpaceTooLarge(budget, work_cap)
            vals = [_apply_base(system.base, f, xs)]
            for u in range(horizon):
                vals.append(_apply_step(system.step, f, xs, vals[-1], u))
            traces[(fi, xs)] = (p_val, vals)
            report.horizons[(fi, xs)] = horizon
            report.checked_cases += 1

            q_val = sop_eval(
                system.value_bound, SopEnv([bitlen(x) for x in xs], [f], norm_cap)
            )
            for y in range(p_val + 1):
                if bitlen(vals[y]) > q_val:
                    report.value_bound_violations.append((fi, xs, y, vals[y], q_val))
            for y in range(p_val, horizon + 1):
                if vals[y] != vals[p_val]:
                    report.stabilization_violations.append((fi, xs, y, vals[y]))

    for xs in args_list:
        for fi in range(len(oracles)):
            p_val, vals = traces[(fi, xs)]
            for fj in range(len(oracles)):
                if fi == fj:
                    continue
                _, vals2 = traces[(fj, xs)]
                report.checked_pairs += 1
                if vals[: p_val + 1] != vals2[: p_val + 1]:
                    continue
                h = min(len(vals), len(vals2))
                for y in range(h):
                    if vals[y] != vals2[y]:
                        report.locality_violations.append((fi, fj, xs, y))
                        break
    return report
