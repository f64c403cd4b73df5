"""Deterministic generator families for sampling-based verification.

Random functional terms are built top-down against a target rank with a
rejection step that discards candidates whose inferred length bound blows
up at the planned input sizes, so sampled evaluation stays cheap.  The
polynomial and scheme families below are the fixed desk-scale test beds
the acceptance suite runs on.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Optional

from . import bounds as bounds_mod
from . import sop as sop_mod
from . import terms as terms_mod
from .schemes import MlrnSystem, PbrplSystem
from .sop import Const, LenVar, NormApp, Plus, Sop, Times
from .terms import Ap, Basis, Comp, Expand, Lit, Lrn, Lrn1, Oracle, Proj, Term, Var


def _estimate(p: Sop, len_bound: int, norm_bound: int) -> int:
    if isinstance(p, Const):
        return p.value
    if isinstance(p, LenVar):
        return len_bound
    if isinstance(p, Plus):
        return _estimate(p.left, len_bound, norm_bound) + _estimate(p.right, len_bound, norm_bound)
    if isinstance(p, Times):
        return _estimate(p.left, len_bound, norm_bound) * _estimate(p.right, len_bound, norm_bound)
    return norm_bound


def random_term(
    rng: random.Random,
    rank: tuple[int, int],
    depth: int = 4,
    max_value_bits: int = 20_000,
    arg_bits: int = 6,
) -> Term:
    """A valid random term of the given rank whose inferred bound stays
    below max_value_bits at the planned argument sizes."""
    for _ in range(200):
        t = _random_term(rng, rank, depth)
        est = _estimate(bounds_mod.infer_bound(t), arg_bits, arg_bits)
        if est <= max_value_bits:
            return t
    return Var(0) if rank[1] else Lit(rng.randrange(16))


def _leaf(rng: random.Random, rank: tuple[int, int]) -> Term:
    k, l = rank
    if l and rng.random() < 0.75:
        return Var(rng.randrange(l))
    return Lit(rng.randrange(16))


def _random_term(rng: random.Random, rank: tuple[int, int], depth: int) -> Term:
    k, l = rank
    if depth <= 0:
        return _leaf(rng, rank)
    roll = rng.random()
    if roll < 0.18:
        return _leaf(rng, rank)
    if roll < 0.55:
        name = rng.choice(["add", "mul", "smash", "monus", "min", "half", "len", "s0", "s1", "msp"])
        arity = terms_mod.BUILTINS[name][0]
        return Comp(
            Basis(name), [_random_term(rng, rank, depth - 1) for _ in range(arity)]
        )
    if roll < 0.72 and k:
        return Ap(rng.randrange(k), _random_term(rng, rank, depth - 1))
    if roll < 0.80 and l:
        return Proj(l, rng.randrange(l) + 1)
    if roll < 0.86 and k + l >= 1:
        dk = rng.randrange(k + 1)
        dl = rng.randrange(l + 1)
        if dk or dl:
            return Expand(_random_term(rng, (k - dk, l - dl), depth - 1), dk, dl)
        return _leaf(rng, rank)
    if l:
        base = _random_term(rng, (k, l - 1), depth - 1)
        bound = _random_term(rng, (k, l), depth - 1)
        if rng.random() < 0.5:
            return Lrn1(base, _random_term(rng, (k, l + 1), depth - 1), bound)
        return Lrn(
            base,
            _random_term(rng, (k, l + 1), depth - 1),
            _random_term(rng, (k, l + 1), depth - 1),
            bound,
        )
    return _leaf(rng, rank)


def random_sop(
    rng: random.Random, n_lenvars: int = 2, n_fvars: int = 2, max_depth: int = 3
) -> Sop:
    def build(budget: int) -> Sop:
        roll = rng.random()
        if budget == 0 or roll < 0.30:
            if rng.random() < 0.5:
                return Const(rng.randrange(9))
            return LenVar(rng.randrange(n_lenvars))
        if roll < 0.55:
            return Plus(build(budget - 1), build(budget - 1))
        if roll < 0.75:
            return Times(build(budget - 1), build(budget - 1))
        return NormApp(rng.randrange(n_fvars), build(budget - 1))

    return build(max_depth)


def random_sop_env(
    rng: random.Random, n_lenvars: int = 2, n_fvars: int = 2
) -> sop_mod.SopEnv:
    oracles = [
        Oracle({i: rng.randrange(256) for i in range(8)}, default=rng.randrange(4))
        for _ in range(n_fvars)
    ]
    return sop_mod.SopEnv(
        [rng.randrange(16) for _ in range(n_lenvars)], oracles, norm_cap=10**9
    )


# ---------------------------------------------------------------------------
# Fixed families for the acceptance suite


def witness_family() -> list[tuple[str, Sop, tuple[int, ...]]]:
    """Regular polynomials of depth <= 2 over one function variable with
    small constants, paired with the argument vector they are checked at."""
    x0, x1 = LenVar(0), LenVar(1)
    a1 = NormApp(0, x0)
    a1_plus = NormApp(0, Plus(x0, Const(1)))
    a1_const = NormApp(0, Const(2))
    family: list[tuple[str, Sop, tuple[int, ...]]] = [
        ("zero", Const(0), ()),
        ("const", Const(4), ()),
        ("len", x0, (5,)),
        ("affine", Plus(Times(x0, x1), Const(2)), (3, 1)),
        ("square", Times(x0, x0), (2,)),
        ("norm", a1, (3,)),
        ("norm-plus-1", Plus(a1, Const(1)), (3,)),
        ("norm-of-sum", a1_plus, (1,)),
        ("norm-times-len", Times(a1_const, x0), (3,)),
        ("norm-of-product", NormApp(0, Times(x0, x1)), (3, 3)),
        ("nested", NormApp(0, a1), (3,)),
        ("nested-plus-inner", Plus(NormApp(0, a1), a1), (3,)),
        ("nested-over-const", NormApp(0, Plus(NormApp(0, Const(1)), Const(1))), ()),
        (
            "nested-with-len",
            Plus(NormApp(0, Plus(NormApp(0, x1), x0)), Const(1)),
            (1, 2),
        ),
    ]
    return family


def all_oracle_tables(domain: int, max_value: int) -> Iterator[Oracle]:
    """Every table on 0..domain-1 with values 0..max_value, default 0."""
    for values in itertools.product(range(max_value + 1), repeat=domain):
        yield Oracle(dict(enumerate(values)), default=0)


def mlrn_family(rng: Optional[random.Random] = None) -> list[tuple[str, MlrnSystem, tuple]]:
    """Two-functional systems satisfying their bounds, with oracle-free and
    oracle-using members; every entry carries the alpha it runs on."""
    rng = rng or random.Random(0x5EED)
    plain = ((), ())
    family: list[tuple[str, MlrnSystem, tuple]] = []

    family.append(
        (
            "length-power",
            MlrnSystem(
                bases=(lambda a: 0, lambda a: 1),
                steps=(lambda u, p, a: p[0] + 1, lambda u, p, a: 2 * p[1]),
                bounds=(
                    lambda u, e, a: u + 1,
                    lambda u, e, a: terms_mod.smash(1, u),
                ),
            ),
            plain,
        )
    )
    family.append(
        (
            "constants",
            MlrnSystem(
                bases=(lambda a: 0, lambda a: 0),
                steps=(lambda u, p, a: p[0], lambda u, p, a: p[1]),
                bounds=(lambda u, e, a: u, lambda u, e, a: u),
            ),
            plain,
        )
    )
    family.append(
        (
            "identity-and-half-count",
            MlrnSystem(
                bases=(lambda a: 0, lambda a: 0),
                steps=(
                    lambda u, p, a: u,
                    lambda u, p, a: p[1] + (1 - u % 2),
                ),
                bounds=(lambda u, e, a: u, lambda u, e, a: u + 1),
            ),
            plain,
        )
    )
    family.append(
        (
            "popcount-pair",
            MlrnSystem(
                bases=(lambda a: 0, lambda a: 0),
                steps=(
                    lambda u, p, a: p[0] + u % 2,
                    lambda u, p, a: p[1] + (p[0] % 2),
                ),
                bounds=(lambda u, e, a: u + 1, lambda u, e, a: u + 1),
            ),
            plain,
        )
    )

    # sixteen parameterized members: affine first functional, second folds it
    for i in range(16):
        c1 = rng.randrange(1, 4)
        c2 = rng.randrange(3)
        pick = rng.randrange(3)

        def step1(u, p, a, c1=c1, c2=c2):
            return min(c1 * p[0] + c2, 255)

        def bound1(u, e, a):
            return 255

        if pick == 0:
            step2 = lambda u, p, a: min(p[0] + p[1], 511)
            bound2 = lambda u, e, a: 511
        elif pick == 1:
            step2 = lambda u, p, a: max(p[0], p[1])
            bound2 = lambda u, e, a: max(e[0], 255)
        else:
            step2 = lambda u, p, a: (p[1] + u) % 97
            bound2 = lambda u, e, a: 97
        family.append(
            (
                f"affine-{i}",
                MlrnSystem(
                    bases=(lambda a, c2=c2: c2, lambda a: 0),
                    steps=(step1, step2),
                    bounds=(bound1, bound2),
                ),
                plain,
            )
        )

    # an oracle-using member: fold answers along the notation, sum norms so far
    def h1(u, p, a):
        return max(p[0], a[0][0].peek(u % 16))

    family.append(
        (
            "oracle-fold",
            MlrnSystem(
                bases=(lambda a: 0, lambda a: 0),
                steps=(h1, lambda u, p, a: min(p[1] + p[0], 4095)),
                bounds=(lambda u, e, a: 255, lambda u, e, a: 4095),
            ),
            ((Oracle({i: (i * 11 + 2) % 200 for i in range(16)}, default=3),), ()),
        )
    )
    return family


def mlrn_three_functional_system() -> tuple[MlrnSystem, tuple]:
    system = MlrnSystem(
        bases=(lambda a: 0, lambda a: 1, lambda a: 0),
        steps=(
            lambda u, p, a: p[0] + 1,
            lambda u, p, a: 2 * p[1],
            lambda u, p, a: 2 * p[2] + 2 * p[1],
        ),
        bounds=(
            lambda u, e, a: u + 1,
            lambda u, e, a: terms_mod.smash(1, u),
            lambda u, e, a: (e[0] + 1) * e[1],
        ),
    )
    return system, ((), ())


def decreasing_oracle_tables(count: int, seed: int = 0xF1D0) -> list[Oracle]:
    """Tables with f(y) <= y on 0..7: iteration from any start reaches a
    fixpoint within seven steps."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        out.append(Oracle({y: rng.randrange(y + 1) for y in range(8)}, default=0))
    return out


def pbrpl_family() -> list[tuple[str, PbrplSystem, list[Oracle], list[list[int]]]]:
    """Systems satisfying the polynomial-length side conditions on their
    attached domains of oracle tables over [0,7]."""
    prev, u_arg = Var(1), Var(2)
    follow = Ap(0, prev)  # step (x0, prev, u) -> f(prev)
    tables = decreasing_oracle_tables(14)
    xs = [[x] for x in range(8)]
    family: list[tuple[str, PbrplSystem, list[Oracle], list[list[int]]]] = []

    family.append(
        (
            "fixpoint-chase",
            PbrplSystem(Var(0), follow, Const(8), Const(3)),
            tables,
            xs,
        )
    )
    family.append(
        (
            "fixpoint-chase-norm-length",
            PbrplSystem(
                Var(0), follow, Plus(NormApp(0, Const(3)), Const(8)), Const(3)
            ),
            tables,
            xs,
        )
    )
    family.append(
        (
            "countdown",
            PbrplSystem(
                Var(0), Comp(Basis("monus"), [prev, Lit(1)]), Const(8), Const(3)
            ),
            [Oracle({}, 0)],
            xs,
        )
    )
    for cap in (1, 2, 3, 5, 6, 7):
        family.append(
            (
                f"saturating-counter-{cap}",
                PbrplSystem(
                    Lit(0),
                    Comp(Basis("min"), [Comp(Basis("add"), [prev, Lit(1)]), Lit(cap)]),
                    Const(8),
                    Const(3),
                ),
                [Oracle({}, 0)],
                xs,
            )
        )
    family.append(
        (
            "constant",
            PbrplSystem(Lit(5), prev, Const(4), Const(3)),
            [Oracle({}, 0), Oracle({1: 1}, 0)],
            xs,
        )
    )
    family.append(
        (
            "zero-length",
            PbrplSystem(Var(0), prev, Const(0), Const(3)),
            [Oracle({}, 0)],
            xs,
        )
    )
    return family
