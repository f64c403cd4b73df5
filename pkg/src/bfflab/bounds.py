"""Structural inference of majorizing second-order polynomials.

Every functional term gets a polynomial over the lengths of its number
arguments and the norms of its oracles that bounds the length of its value
on all inputs.  The rules are deliberately slack (a majorant is needed,
not a tight one) and monotone in every position, which is what makes
substitution under composition sound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NormCapExceeded
from . import sop as sop_mod
from .sop import Const, LenVar, NormApp, Plus, Sop, SopEnv, Times, sop_eval
from . import terms
from .terms import Oracle, Term, bitlen, eval_term


def sop_substitute(p: Sop, substitution: dict[int, Sop]) -> Sop:
    """Replace each |x_i| by substitution[i]."""
    if isinstance(p, Const):
        return p
    if isinstance(p, LenVar):
        return substitution[p.index]
    if isinstance(p, Plus):
        return Plus(sop_substitute(p.left, substitution), sop_substitute(p.right, substitution))
    if isinstance(p, Times):
        return Times(sop_substitute(p.left, substitution), sop_substitute(p.right, substitution))
    if isinstance(p, NormApp):
        return NormApp(p.oracle, sop_substitute(p.arg, substitution))
    raise TypeError(f"not a polynomial: {p!r}")


_ONE = Const(1)

# length bound of each basis function in terms of its argument lengths
_BASIS_BOUNDS: dict[str, Sop] = {
    "o": Const(0),
    "s0": Plus(LenVar(0), _ONE),
    "s1": Plus(LenVar(0), _ONE),
    "len": LenVar(0),
    "half": LenVar(0),
    "add": Plus(Plus(LenVar(0), LenVar(1)), _ONE),
    "mul": Plus(LenVar(0), LenVar(1)),
    "smash": Plus(Times(LenVar(0), LenVar(1)), _ONE),
    "msp": LenVar(0),
    "monus": LenVar(0),
    "min": LenVar(0),
    "condle": Plus(LenVar(2), LenVar(3)),
}


def infer_bound(t: Term) -> Sop:
    """A polynomial majorizing the value length of a validated term.

    Composition substitutes the argument bounds into the head's bound;
    recursion nodes delegate to their bound term, whose length limit the
    evaluator enforces by construction.
    """
    if isinstance(t, terms.Basis):
        return _BASIS_BOUNDS[t.name]
    if isinstance(t, terms.Proj):
        return LenVar(t.index - 1)
    if isinstance(t, terms.Var):
        return LenVar(t.index)
    if isinstance(t, terms.Lit):
        return Const(bitlen(t.value))
    if isinstance(t, terms.Ap):
        return NormApp(t.oracle, infer_bound(t.arg))
    if isinstance(t, terms.Comp):
        head_bound = infer_bound(t.head)
        substitution = {i: infer_bound(g) for i, g in enumerate(t.args)}
        return sop_substitute(head_bound, substitution)
    if isinstance(t, terms.Expand):
        return infer_bound(t.inner)
    if isinstance(t, (terms.Lrn, terms.Lrn1)):
        return infer_bound(t.bound)
    raise TypeError(f"not a term: {t!r}")


@dataclass
class MajorizationReport:
    checked: int = 0
    skipped_norm_cap: int = 0
    violations: list = field(default_factory=list)
    samples: list = field(default_factory=list)  # (bound value, |value|) pairs

    @property
    def ok(self) -> bool:
        return not self.violations


def check_majorization(
    t: Term,
    bound: Sop,
    samples: Iterable[tuple[Sequence[Oracle], Sequence[int]]],
    norm_cap: int = sop_mod.DEFAULT_NORM_CAP,
    fuel: int = terms.DEFAULT_FUEL,
) -> MajorizationReport:
    """Check |t(f..., x...)| <= bound(|f...|, |x...|) on every sample.

    Samples where the bound's norm arguments exceed the cap are skipped
    and counted rather than failed.
    """
    report = MajorizationReport()
    for oracles, args in samples:
        value = eval_term(t, oracles, args, fuel=fuel)
        env = SopEnv([bitlen(a) for a in args], oracles, norm_cap)
        try:
            limit = sop_eval(bound, env)
        except NormCapExceeded:
            report.skipped_norm_cap += 1
            continue
        report.checked += 1
        report.samples.append((limit, bitlen(value)))
        if bitlen(value) > limit:
            report.violations.append(
                (tuple(repr(f) for f in oracles), tuple(args), bitlen(value), limit)
            )
    return report


def sample_inputs(
    rank: tuple[int, int],
    count: int,
    rng: random.Random,
    max_arg_bits: int = 8,
    table_domain: int = 16,
    max_table_bits: int = 8,
) -> list[tuple[tuple[Oracle, ...], tuple[int, ...]]]:
    """Random oracle/argument vectors for a given rank."""
    k, l = rank
    out = []
    for _ in range(count):
        oracles = tuple(
            Oracle(
                {
                    key: rng.randrange(1 << max_table_bits)
                    for key in range(table_domain)
                    if rng.random() < 0.8
                },
                default=rng.randrange(4),
            )
            for _ in range(k)
        )
        args = tuple(rng.randrange(1 << max_arg_bits) for _ in range(l))
        out.append((oracles, args))
    return out
