"""Second-order polynomials: depth, evaluation, regularization, witnesses.

A polynomial is built from natural constants, lengths of number variables
|x_i|, sums, products, and norm applications |f_j|(P).  Evaluating a norm
application consults an oracle through the norm functional
|f|(x) = max over |y| <= x of |f(y)|, which enumerates exponentially many
points; evaluation therefore carries a cap on admissible norm arguments.

`witness_terms` turns a regular polynomial bound |u| <= P into an
equivalent chain of bounded existentials over functional terms, and
`witness_check` verifies that equivalence by brute force.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import NormCapExceeded, NotRegular, SearchSpaceTooLarge, WitnessUnsupported
from . import terms
from .terms import Oracle, Term, bitlen

DEFAULT_NORM_CAP = 20


@dataclass(frozen=True)
class Sop:
    pass


@dataclass(frozen=True)
class Const(Sop):
    value: int


@dataclass(frozen=True)
class LenVar(Sop):
    index: int


@dataclass(frozen=True)
class Plus(Sop):
    left: Sop
    right: Sop


@dataclass(frozen=True)
class Times(Sop):
    left: Sop
    right: Sop


@dataclass(frozen=True)
class NormApp(Sop):
    oracle: int
    arg: Sop


def depth(p: Sop) -> int:
    """Maximal nesting of norm applications."""
    if isinstance(p, (Const, LenVar)):
        return 0
    if isinstance(p, (Plus, Times)):
        return max(depth(p.left), depth(p.right))
    if isinstance(p, NormApp):
        return depth(p.arg) + 1
    raise TypeError(f"not a polynomial: {p!r}")


def len_vars(p: Sop) -> set[int]:
    if isinstance(p, Const):
        return set()
    if isinstance(p, LenVar):
        return {p.index}
    if isinstance(p, (Plus, Times)):
        return len_vars(p.left) | len_vars(p.right)
    return len_vars(p.arg)


def norm_vars(p: Sop) -> set[int]:
    if isinstance(p, (Const, LenVar)):
        return set()
    if isinstance(p, (Plus, Times)):
        return norm_vars(p.left) | norm_vars(p.right)
    return {p.oracle} | norm_vars(p.arg)


# ---------------------------------------------------------------------------
# The norm functional


def norm(f: Oracle, x: int, cap: int = DEFAULT_NORM_CAP) -> int:
    """|f|(x): the largest |f(y)| over all y with |y| <= x.

    The domain {y : |y| <= x} has 2^x points, so arguments beyond the cap
    are refused.  For table oracles the maximum is located directly from
    the finitely many stored entries plus the default, which returns the
    same value the literal enumeration would (see norm_by_enumeration).
    """
    if x > cap:
        raise NormCapExceeded(x, cap)
    best = 0
    in_range = 0
    for key, val in f.table.items():
        if bitlen(key) <= x:
            in_range += 1
            b = bitlen(val)
            if b > best:
                best = b
    # the default value occurs iff the table does not cover all 2^x points
    if x >= 64 or in_range < (1 << x):
        b = bitlen(f.default)
        if b > best:
            best = b
    return best


def norm_by_enumeration(f: Oracle, x: int, cap: int = DEFAULT_NORM_CAP) -> int:
    """Literal brute-force norm; the oracle `norm` is checked against."""
    if x > cap:
        raise NormCapExceeded(x, cap)
    return max((bitlen(f.peek(y)) for y in range(1 << x)), default=0)


@dataclass
class SopEnv:
    """Evaluation context: values of |x_i|, norm sources, and the norm cap."""

    lens: Sequence[int]
    norm_sources: Sequence[Oracle] = ()
    norm_cap: int = DEFAULT_NORM_CAP
    _cache: dict = field(default_factory=dict, repr=False)

    def len_of(self, i: int) -> int:
        return self.lens[i]

    def norm_of(self, j: int, x: int) -> int:
        key = (j, x)
        got = self._cache.get(key)
        if got is None:
            got = norm(self.norm_sources[j], x, self.norm_cap)
            self._cache[key] = got
        return got


def sop_eval(p: Sop, env: SopEnv) -> int:
    if isinstance(p, Const):
        return p.value
    if isinstance(p, LenVar):
        return env.len_of(p.index)
    if isinstance(p, Plus):
        return sop_eval(p.left, env) + sop_eval(p.right, env)
    if isinstance(p, Times):
        return sop_eval(p.left, env) * sop_eval(p.right, env)
    if isinstance(p, NormApp):
        return env.norm_of(p.oracle, sop_eval(p.arg, env))
    raise TypeError(f"not a polynomial: {p!r}")


# ---------------------------------------------------------------------------
# Regular polynomials

def _apps_by_depth(p: Sop) -> dict[tuple[int, int], list[NormApp]]:
    """Distinct NormApp subpolynomials keyed by (oracle, depth), in
    first-occurrence order."""
    seen: dict[tuple[int, int], list[NormApp]] = {}

    def walk(q: Sop):
        if isinstance(q, (Plus, Times)):
            walk(q.left)
            walk(q.right)
        elif isinstance(q, NormApp):
            key = (q.oracle, depth(q))
            bucket = seen.setdefault(key, [])
            if q not in bucket:
                bucket.append(q)
            walk(q.arg)

    walk(p)
    return seen


def is_regular(p: Sop) -> bool:
    """True iff every occurring function variable has exactly one distinct
    norm-application subpolynomial at every depth level 1..depth(p)."""
    d = depth(p)
    if d == 0:
        return True
    apps = _apps_by_depth(p)
    for j in norm_vars(p):
        for m in range(1, d + 1):
            if len(apps.get((j, m), [])) != 1:
                return False
    return True


def _sum_of(parts: Sequence[Sop]) -> Sop:
    acc = parts[0]
    for q in parts[1:]:
        acc = Plus(acc, q)
    return acc


def regularize(p: Sop) -> Sop:
    """Majorize p by a regular polynomial of the same depth.

    Working up from depth 1, the distinct arguments of each function
    variable's applications at one level are replaced by their sum, which
    can only increase the value (norms are monotone).  If a variable is
    then still missing a level below the overall depth, a padding chain of
    applications over the already-unique lower level is added on top; the
    extra summands again only increase the value.
    """
    d = depth(p)
    if d == 0:
        return p
    result = p
    for m in range(1, d + 1):
        # distinct arguments per variable at this level, first-occurrence order
        merged: dict[int, list[Sop]] = {}

        def collect(q: Sop):
            if isinstance(q, (Plus, Times)):
                collect(q.left)
                collect(q.right)
            elif isinstance(q, NormApp):
                collect(q.arg)
                if depth(q) == m:
                    bucket = merged.setdefault(q.oracle, [])
                    if q.arg not in bucket:
                        bucket.append(q.arg)

        collect(result)
        sums = {j: _sum_of(a) for j, a in merged.items()}

        def rewrite(q: Sop) -> Sop:
            if isinstance(q, Plus):
                return Plus(rewrite(q.left), rewrite(q.right))
            if isinstance(q, Times):
                return Times(rewrite(q.left), rewrite(q.right))
            if isinstance(q, NormApp):
                arg = rewrite(q.arg)
                node = NormApp(q.oracle, arg)
                if depth(node) == m:
                    return NormApp(q.oracle, sums[q.oracle])
                return node
            return q

        result = rewrite(result)

    # pad variables that miss a depth level entirely
    apps = _apps_by_depth(result)
    pads: list[Sop] = []
    for j in sorted(norm_vars(result)):
        prev: Optional[Sop] = None
        for m in range(1, d + 1):
            bucket = apps.get((j, m), [])
            if bucket:
                prev = bucket[0]
            else:
                pad = NormApp(j, Const(0) if prev is None else prev)
                pads.append(pad)
                apps[(j, m)] = [pad]
                prev = pad
    for pad in pads:
        result = Plus(result, pad)
    return result


# ---------------------------------------------------------------------------
# Witness terms (bounded-existential characterization of |u| <= P)


def inferred_num_args(p: Sop) -> int:
    vs = len_vars(p)
    return max(vs) + 1 if vs else 0


def witness_terms(p: Sop, num_args: Optional[int] = None) -> list[Term]:
    """Terms t_0..t_d such that |u| <= P(|f|,|x...|) iff there are
    z_1 <= t_0(x...), ..., z_d <= t_{d-1}(f,x...,z...) with u <= t_d.

    Each t_m takes the number arguments x_0..x_{l-1} followed by
    z_1..z_m; num_args fixes l (default: inferred from p).  Internally
    every subpolynomial value V is represented by a term computing
    exactly 2^V, so the final comparator is 2^P - 1, the largest number
    of length P.  Witness z_m stands for the argument of the unique
    depth-m norm application; the maximizing choice realizes the norm,
    and any admissible choice stays below it.
    """
    if not is_regular(p):
        raise NotRegular("witness terms require a regular polynomial")
    fvars = norm_vars(p)
    if len(fvars) > 1:
        raise WitnessUnsupported("witness terms are defined over one function variable")
    l = inferred_num_args(p) if num_args is None else num_args
    d = depth(p)

    apps = _apps_by_depth(p)
    chain: list[NormApp] = []
    if fvars:
        j = next(iter(fvars))
        chain = [apps[(j, m)][0] for m in range(1, d + 1)]

    def fold(node: Term) -> Term:
        # constant-fold literal-only arithmetic so trivial bounds print small
        if isinstance(node, terms.Comp) and all(
            isinstance(a, terms.Lit) for a in node.args
        ):
            if isinstance(node.head, terms.Basis):
                return terms.Lit(
                    terms.eval_builtin(node.head.name, [a.value for a in node.args])
                )
        return node

    def comp(name: str, *args: Term) -> Term:
        return fold(terms.Comp(terms.Basis(name), args))

    def power_term(q: Sop) -> Term:
        # a term whose value is exactly 2^(value of q)
        if isinstance(q, Const):
            return terms.Lit(1 << q.value)
        if isinstance(q, LenVar):
            return comp("smash", terms.Lit(1), terms.Var(q.index))
        if isinstance(q, Plus):
            return comp("mul", power_term(q.left), power_term(q.right))
        if isinstance(q, Times):
            return comp(
                "smash",
                comp("half", power_term(q.left)),
                comp("half", power_term(q.right)),
            )
        if isinstance(q, NormApp):
            m = depth(q)
            z = terms.Var(l + m - 1)
            return comp("smash", terms.Lit(1), terms.Ap(q.oracle, z))
        raise TypeError(f"not a polynomial: {q!r}")

    def ceiling(q: Sop) -> Term:
        return comp("monus", power_term(q), terms.Lit(1))

    out = [ceiling(app.arg) for app in chain]
    out.append(ceiling(p))
    return out


@dataclass
class WitnessReport:
    polynomial_value: int
    rhs_max: int
    checked: int = 0
    tuples_visited: int = 0
    disagreements: list[tuple[int, bool, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def witness_check(
    p: Sop,
    witness: Sequence[Term],
    oracles: Sequence[Oracle],
    args: Sequence[int],
    u_range: Iterable[int],
    num_args: Optional[int] = None,
    tuple_cap: int = 2_000_000,
    norm_cap: int = DEFAULT_NORM_CAP,
) -> WitnessReport:
    """Brute-force check of the bounded-existential equivalence.

    The left side |u| <= P is evaluated through sop_eval; the right side
    enumerates every witness tuple admitted by the term bounds and takes
    the best final comparator, visiting at most tuple_cap tuples.
    """
    if len(witness) < 1:
        raise ValueError("need at least the final comparator term")
    l = inferred_num_args(p) if num_args is None else num_args
    if len(args) != l:
        raise ValueError(f"polynomial takes {l} number arguments, got {len(args)}")
    env = SopEnv([bitlen(a) for a in args], oracles, norm_cap)
    pval = sop_eval(p, env)

    final = witness[-1]
    bounds = witness[:-1]
    visited = 0

    def best_final(prefix: tuple[int, ...]) -> int:
        nonlocal visited
        visited += 1
        if visited > tuple_cap:
            raise SearchSpaceTooLarge(visited, tuple_cap)
        if len(prefix) == len(bounds):
            return terms.eval_term(final, oracles, tuple(args) + prefix)
        limit = terms.eval_term(bounds[len(prefix)], oracles, tuple(args) + prefix)
        best = -1
        for z in range(limit + 1):
            got = best_final(prefix + (z,))
            if got > best:
                best = got
        return best

    rhs_max = best_final(())
    report = WitnessReport(polynomial_value=pval, rhs_max=rhs_max)
    report.tuples_visited = visited
    for u in u_range:
        lhs = bitlen(u) <= pval
        rhs = u <= rhs_max
        report.checked += 1
        if lhs != rhs:
            report.disagreements.append((u, lhs, rhs))
    return report
