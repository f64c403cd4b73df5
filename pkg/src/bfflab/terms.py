"""Functional terms over arbitrary-precision naturals with function oracles.

A term denotes a type-2 functional of some rank (k, l): it consumes k total
functions on the naturals (supplied as `Oracle` objects) and l natural
numbers, and produces a natural.  The term language consists of the initial
functions (zero, binary successors, projections, smash), oracle application,
a trusted extended basis of feasible helpers (add, mul, len, half, msp,
monus, min, condle) taken as primitives rather than derived, composition,
expansion, and limited recursion on notation in both the two-branch and the
single-step form.

Recursion-on-notation nodes keep their declared length bound by construction:
each produced value is clamped to the largest number whose binary length does
not exceed the length of the bound term's value (strict mode raises instead
of clamping).  Evaluation is deterministic, instrumented by a `CostLedger`,
and guarded by an explicit fuel budget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import BoundViolation, FuelExhausted, InvalidTerm

DEFAULT_FUEL = 1_000_000


def bitlen(x: int) -> int:
    """Length of the binary representation, with |0| = 0."""
    return x.bit_length()


def half(x: int) -> int:
    return x >> 1


def monus(x: int, y: int) -> int:
    return x - y if x > y else 0


def smash(x: int, y: int) -> int:
    """x # y = 2^(|x|*|y|)."""
    return 1 << (bitlen(x) * bitlen(y))


def msp(x: int, y: int) -> int:
    """The y most significant bits of x: floor(x / 2^(|x| monus y))."""
    return x >> monus(bitlen(x), y)


def condle(a: int, b: int, u: int, v: int) -> int:
    return u if a <= b else v


# name -> (number arity, implementation); all total on naturals
BUILTINS: Mapping[str, tuple[int, Callable[..., int]]] = {
    "o": (1, lambda x: 0),
    "s0": (1, lambda x: 2 * x),
    "s1": (1, lambda x: 2 * x + 1),
    "len": (1, bitlen),
    "half": (1, half),
    "add": (2, lambda x, y: x + y),
    "mul": (2, lambda x, y: x * y),
    "smash": (2, smash),
    "msp": (2, msp),
    "monus": (2, monus),
    "min": (2, min),
    "condle": (4, condle),
}


def eval_builtin(name: str, args: Sequence[int]) -> int:
    arity, fn = BUILTINS[name]
    if len(args) != arity:
        raise ValueError(f"builtin {name} takes {arity} arguments, got {len(args)}")
    return fn(*args)


# ---------------------------------------------------------------------------
# Term AST


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Basis(Term):
    """One of the named basis functions; ignores any oracle arguments."""

    name: str

    def __post_init__(self):
        if self.name not in BUILTINS:
            raise ValueError(f"unknown basis function {self.name!r}")


@dataclass(frozen=True)
class Proj(Term):
    """Projection to the index-th of arity number arguments (1-based)."""

    arity: int
    index: int


@dataclass(frozen=True)
class Var(Term):
    """The i-th number argument (0-based); adapts to any arity > i."""

    index: int


@dataclass(frozen=True)
class Lit(Term):
    """A constant functional returning a fixed natural."""

    value: int


@dataclass(frozen=True)
class Ap(Term):
    """Application of oracle j to the value of a subterm."""

    oracle: int
    arg: Term


@dataclass(frozen=True)
class Comp(Term):
    """head(f..., g1(f...,x...), ..., gm(f...,x...))."""

    head: Term
    args: tuple[Term, ...]

    def __init__(self, head: Term, args: Iterable[Term]):
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Expand(Term):
    """Same functional with extra (trailing, ignored) function/number args."""

    inner: Term
    add_fns: int
    add_args: int


@dataclass(frozen=True)
class Lrn(Term):
    """Limited recursion on notation with separate even/odd step terms.

    At rank (k, l+1): base has rank (k, l); even/odd take the numbers
    (x..., floor(y/2), previous) at rank (k, l+2); bound takes (x..., y)
    at rank (k, l+1).  Values are limited so their length never exceeds
    the length of the bound's value.
    """

    base: Term
    even: Term
    odd: Term
    bound: Term


@dataclass(frozen=True)
class Lrn1(Term):
    """Single-step recursion on notation: step takes (x..., y, previous)."""

    base: Term
    step: Term
    bound: Term


#: the basis application functional f_j(x_0) as a bare term
def ap_basis(oracle: int = 0) -> Ap:
    return Ap(oracle, Var(0))


# ---------------------------------------------------------------------------
# Ranks and validation


@dataclass(frozen=True)
class RankMismatch:
    path: str
    found: tuple[int, int] | str
    expected: tuple[int, int] | str

    def __str__(self):
        return f"{self.path}: rank mismatch, found {self.found}, expected {self.expected}"


@dataclass(frozen=True)
class UnknownOracleIndex:
    path: str

    def __str__(self):
        return f"{self.path}: oracle index out of range"


Issue = Union[RankMismatch, UnknownOracleIndex]


def rank(t: Term) -> tuple[int, int]:
    """Minimal rank (k, l) at which the term is well-formed.

    Basis functions, projections, variables and literals adapt to any
    number of oracle arguments, so the k component is the smallest index
    forced by oracle applications inside the term.
    """
    if isinstance(t, Basis):
        return (0, BUILTINS[t.name][0])
    if isinstance(t, Proj):
        return (0, t.arity)
    if isinstance(t, Var):
        return (0, t.index + 1)
    if isinstance(t, Lit):
        return (0, 0)
    if isinstance(t, Ap):
        k, l = rank(t.arg)
        return (max(k, t.oracle + 1), l)
    if isinstance(t, Comp):
        k, _ = rank(t.head)
        l = 0
        for g in t.args:
            gk, gl = rank(g)
            k = max(k, gk)
            l = max(l, gl)
        return (k, l)
    if isinstance(t, Expand):
        k, l = rank(t.inner)
        return (k + t.add_fns, l + t.add_args)
    if isinstance(t, (Lrn, Lrn1)):
        steps = (t.even, t.odd) if isinstance(t, Lrn) else (t.step,)
        k = max(rank(s)[0] for s in (t.base, t.bound) + steps)
        l = max(
            1,
            rank(t.base)[1] + 1,
            rank(t.bound)[1],
            *(rank(s)[1] - 1 for s in steps),
        )
        return (k, l)
    raise TypeError(f"not a term: {t!r}")


def validate_term(t: Term, expected_rank: tuple[int, int]) -> list[Issue]:
    """Check rank consistency of every subterm against an expected root rank.

    Returns the (possibly empty) list of issues; an empty list means ok.
    """
    issues: list[Issue] = []
    _validate(t, expected_rank, "root", issues)
    return issues


def _validate(t: Term, want: tuple[int, int], path: str, out: list[Issue]) -> None:
    k, l = want
    if k < 0 or l < 0:
        out.append(RankMismatch(path, "negative rank", want))
        return
    if isinstance(t, Basis):
        need = BUILTINS[t.name][0]
        if l != need:
            out.append(RankMismatch(path, (0, need), want))
    elif isinstance(t, Proj):
        if t.arity != l or not (1 <= t.index <= t.arity):
            out.append(RankMismatch(path, (0, t.arity), want))
    elif isinstance(t, Var):
        if t.index >= l:
            out.append(RankMismatch(path, (0, t.index + 1), want))
    elif isinstance(t, Lit):
        pass
    elif isinstance(t, Ap):
        if t.oracle >= k:
            out.append(UnknownOracleIndex(path))
        _validate(t.arg, (k, l), path + ".arg", out)
    elif isinstance(t, Comp):
        _validate(t.head, (k, len(t.args)), path + ".head", out)
        for i, g in enumerate(t.args):
            _validate(g, (k, l), f"{path}.g{i}", out)
    elif isinstance(t, Expand):
        _validate(t.inner, (k - t.add_fns, l - t.add_args), path + ".inner", out)
    elif isinstance(t, Lrn):
        if l < 1:
            out.append(RankMismatch(path, "needs a recursion argument", want))
            return
        _validate(t.base, (k, l - 1), path + ".g", out)
        _validate(t.even, (k, l + 1), path + ".h1", out)
        _validate(t.odd, (k, l + 1), path + ".h2", out)
        _validate(t.bound, (k, l), path + ".k", out)
    elif isinstance(t, Lrn1):
        if l < 1:
            out.append(RankMismatch(path, "needs a recursion argument", want))
            return
        _validate(t.base, (k, l - 1), path + ".g", out)
        _validate(t.step, (k, l + 1), path + ".h", out)
        _validate(t.bound, (k, l), path + ".k", out)
    else:
        raise TypeError(f"not a term: {t!r}")


def ensure_valid(t: Term, expected_rank: tuple[int, int]) -> None:
    issues = validate_term(t, expected_rank)
    if issues:
        raise InvalidTerm(issues)


# ---------------------------------------------------------------------------
# Oracles and cost accounting


class Oracle:
    """A total function on the naturals: finite table plus a constant default.

    Queries through `query` are appended to `query_log` in call order;
    `peek` reads without logging (used by norm computations, which are not
    oracle calls made by the evaluated program).
    """

    def __init__(self, table: Mapping[int, int] | None = None, default: int = 0):
        self.table = dict(table or {})
        self.default = default
        self.query_log: list[int] = []

    def query(self, x: int) -> int:
        self.query_log.append(x)
        return self.table.get(x, self.default)

    def peek(self, x: int) -> int:
        return self.table.get(x, self.default)

    def clear_log(self) -> None:
        self.query_log.clear()

    def restricted(self, points: Iterable[int], default: int | None = None) -> "Oracle":
        """A fresh oracle agreeing with this one on `points` only."""
        d = self.default if default is None else default
        return Oracle({p: self.peek(p) for p in points}, default=d)

    def __repr__(self):
        return f"Oracle({self.table!r}, default={self.default})"


@dataclass
class CostLedger:
    """Monotone counters accumulated over one or more evaluations.

    kc_oracle_cost is the exact sum of |f(z)| over queries, so it may be
    smaller than oracle_queries when answers are 0.
    """

    builtin_steps: int = 0
    oracle_queries: int = 0
    kc_oracle_cost: int = 0
    peak_value_bits: int = 0

    def note_value(self, v: int) -> None:
        b = v.bit_length()
        if b > self.peak_value_bits:
            self.peak_value_bits = b

    def snapshot(self) -> "CostLedger":
        return replace(self)


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, amount: int):
        self.left = amount

    def spend(self, n: int = 1) -> None:
        self.left -= n
        if self.left < 0:
            raise FuelExhausted("evaluation fuel exhausted")


# ---------------------------------------------------------------------------
# Evaluation


def kstar_of(bound_value: int) -> int:
    """Largest number whose binary length is at most |bound_value|."""
    return (1 << bitlen(bound_value)) - 1


def eval_term(
    t: Term,
    oracles: Sequence[Oracle] = (),
    args: Sequence[int] = (),
    ledger: Optional[CostLedger] = None,
    fuel: int = DEFAULT_FUEL,
    bound_mode: str = "clamp",
    recursion_observer: Optional[Callable[[Term, int, int, int], None]] = None,
) -> int:
    """Evaluate a validated term on the given oracles and number arguments.

    bound_mode selects what happens when a recursion value exceeds its
    declared length bound: "clamp" limits it to the largest value of the
    permitted length, "strict" raises BoundViolation.  recursion_observer,
    if given, is called as (node, y, value, bound_value) at every recursion
    step of every Lrn/Lrn1 node, after clamping.
    """
    if bound_mode not in ("clamp", "strict"):
        raise ValueError(f"bad bound_mode {bound_mode!r}")
    return _eval(
        t,
        tuple(oracles),
        tuple(args),
        ledger if ledger is not None else CostLedger(),
        _Fuel(fuel),
        bound_mode,
        recursion_observer,
    )


def _eval(t, oracles, args, ledger, fuel, mode, observer) -> int:
    if isinstance(t, Basis):
        fuel.spend()
        ledger.builtin_steps += 1
        v = BUILTINS[t.name][1](*args)
        ledger.note_value(v)
        return v
    if isinstance(t, Proj):
        v = args[t.index - 1]
        ledger.note_value(v)
        return v
    if isinstance(t, Var):
        v = args[t.index]
        ledger.note_value(v)
        return v
    if isinstance(t, Lit):
        ledger.note_value(t.value)
        return t.value
    if isinstance(t, Ap):
        x = _eval(t.arg, oracles, args, ledger, fuel, mode, observer)
        fuel.spend()
        v = oracles[t.oracle].query(x)
        ledger.oracle_queries += 1
        ledger.kc_oracle_cost += bitlen(v)
        ledger.note_value(v)
        return v
    if isinstance(t, Comp):
        inner = tuple(
            _eval(g, oracles, args, ledger, fuel, mode, observer) for g in t.args
        )
        return _eval(t.head, oracles, inner, ledger, fuel, mode, observer)
    if isinstance(t, Expand):
        keep_fns = len(oracles) - t.add_fns
        keep_args = len(args) - t.add_args
        return _eval(
            t.inner, oracles[:keep_fns], args[:keep_args], ledger, fuel, mode, observer
        )
    if isinstance(t, (Lrn, Lrn1)):
        return _eval_recursion(t, oracles, args, ledger, fuel, mode, observer)
    raise TypeError(f"not a term: {t!r}")


def _limit(t, y, v, kval, mode, observer):
    cap = kstar_of(kval)
    if v > cap:
        if mode == "strict":
            raise BoundViolation(y, v, kval)
        v = cap
    if observer is not None:
        observer(t, y, v, kval)
    return v


def _eval_recursion(t, oracles, args, ledger, fuel, mode, observer) -> int:
    xs = args[:-1]
    y = args[-1]
    # most-significant prefixes of y: 0 = y>>|y|, ..., y>>1, y
    chain = [y >> i for i in range(bitlen(y), -1, -1)]
    fuel.spend()
    kval = _eval(t.bound, oracles, xs + (0,), ledger, fuel, mode, observer)
    v = _eval(t.base, oracles, xs, ledger, fuel, mode, observer)
    v = _limit(t, 0, v, kval, mode, observer)
    ledger.note_value(v)
    for u in chain[1:]:
        fuel.spend()
        if isinstance(t, Lrn):
            branch = t.even if u % 2 == 0 else t.odd
            step_args = xs + (u >> 1, v)
        else:
            branch = t.step
            step_args = xs + (u, v)
        v = _eval(branch, oracles, step_args, ledger, fuel, mode, observer)
        kval = _eval(t.bound, oracles, xs + (u,), ledger, fuel, mode, observer)
        v = _limit(t, u, v, kval, mode, observer)
        ledger.note_value(v)
    return v
