import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfflab.errors import BoundViolation, FuelExhausted
from bfflab.terms import (
    Ap,
    Basis,
    Comp,
    CostLedger,
    Expand,
    Lit,
    Lrn,
    Lrn1,
    Oracle,
    Proj,
    RankMismatch,
    UnknownOracleIndex,
    Var,
    bitlen,
    eval_builtin,
    eval_term,
    rank,
    validate_term,
)

# handy pieces
ADD = Basis("add")
SMASH = Basis("smash")
ZERO = Basis("o")


def smash_oracle(x, y):
    # independent reading of x # y via the binary strings
    lx = len(bin(x)) - 2 if x else 0
    ly = len(bin(y)) - 2 if y else 0
    return 2 ** (lx * ly)


def test_builtin_smash_against_string_oracle():
    assert eval_builtin("smash", [2, 3]) == 16 == smash_oracle(2, 3)
    for x in range(16):
        for y in range(16):
            assert eval_builtin("smash", [x, y]) == smash_oracle(x, y)


def test_builtin_len_of_zero_is_zero():
    assert eval_builtin("len", [0]) == 0


def test_builtin_msp_pinned_cases():
    # floor(13 / 2^(|13| - 2)) = floor(13/4)
    assert eval_builtin("msp", [13, 2]) == 3
    assert eval_builtin("msp", [13, 0]) == 0
    assert eval_builtin("msp", [13, 7]) == 13


@given(st.integers(0, 10**6), st.integers(0, 40))
def test_msp_matches_bitstring_slice(x, y):
    s = bin(x)[2:] if x else ""
    expect = int(s[:y], 2) if s[:y] else 0
    assert eval_builtin("msp", [x, y]) == expect


def test_builtin_monus_and_min():
    assert eval_builtin("monus", [3, 5]) == 0
    assert eval_builtin("monus", [5, 3]) == 2
    assert eval_builtin("min", [4, 9]) == 4


# ---------------------------------------------------------------------------
# validation and ranks


def test_validate_zero_at_rank_0_1():
    assert validate_term(ZERO, (0, 1)) == []


def test_validate_lrn_with_wrong_step_arity():
    # step of arity l+1 instead of l+2
    bad = Lrn(
        base=Lit(0),
        even=Proj(1, 1),
        odd=Proj(2, 1),
        bound=Proj(1, 1),
    )
    issues = validate_term(bad, (0, 1))
    assert any(isinstance(i, RankMismatch) for i in issues)


def test_validate_comp_smash_of_projections():
    t = Comp(SMASH, [Proj(2, 1), Proj(2, 2)])
    assert validate_term(t, (0, 2)) == []


def test_validate_unknown_oracle_index():
    t = Ap(1, Var(0))
    issues = validate_term(t, (1, 1))
    assert any(isinstance(i, UnknownOracleIndex) for i in issues)


def test_rank_of_basis_and_ap():
    assert rank(ZERO) == (0, 1)
    assert rank(Ap(0, Var(0))) == (1, 1)


def test_rank_of_expand():
    inner = Ap(0, Var(0))
    assert rank(Expand(inner, 1, 2)) == (2, 3)


# ---------------------------------------------------------------------------
# evaluation


def test_eval_oracle_application():
    f = Oracle({0: 5})
    assert eval_term(Ap(0, Var(0)), [f], [0]) == 5
    assert f.query_log == [0]


def test_eval_comp_smash():
    t = Comp(SMASH, [Proj(2, 1), Proj(2, 2)])
    assert eval_term(t, [], [2, 3]) == 16


def unfold_lrn1(base, step, y):
    # independent brute-force unfolding for Lrn1 fixtures (no bound logic)
    if y == 0:
        return base()
    return step(y, unfold_lrn1(base, step, y >> 1))


def test_lrn1_computes_binary_length():
    # base 0, step (y, prev) -> prev + 1, bound y + 1
    t = Lrn1(
        base=Lit(0),
        step=Comp(ADD, [Var(1), Lit(1)]),
        bound=Comp(ADD, [Var(0), Lit(1)]),
    )
    assert validate_term(t, (0, 1)) == []
    expect = unfold_lrn1(lambda: 0, lambda y, prev: prev + 1, 13)
    assert expect == 4
    assert eval_term(t, [], [13]) == 4
    for y in range(512):
        assert eval_term(t, [], [y]) == unfold_lrn1(lambda: 0, lambda y_, p: p + 1, y)
        assert eval_term(t, [], [y]) == bitlen(y)


def test_lrn_two_branch_matches_lrn1_for_length():
    t = Lrn(
        base=Lit(0),
        even=Comp(ADD, [Var(1), Lit(1)]),
        odd=Comp(ADD, [Var(1), Lit(1)]),
        bound=Comp(ADD, [Var(0), Lit(1)]),
    )
    assert validate_term(t, (0, 1)) == []
    for y in range(256):
        assert eval_term(t, [], [y]) == bitlen(y)


def test_lrn_even_odd_branches_select_on_parity():
    # even branch doubles, odd branch doubles and adds one: rebuilds y itself
    t = Lrn(
        base=Lit(0),
        even=Comp(Basis("s0"), [Var(1)]),
        odd=Comp(Basis("s1"), [Var(1)]),
        bound=Proj(1, 1),
    )
    for y in range(256):
        assert eval_term(t, [], [y]) == y


def test_lrn_clamps_to_bound_length():
    # step doubles the previous value but bound stays at 1, so values clamp to 1
    t = Lrn1(
        base=Lit(1),
        step=Comp(Basis("s0"), [Var(1)]),
        bound=Lit(1),
    )
    assert eval_term(t, [], [9]) == 1


def test_lrn_strict_mode_raises():
    t = Lrn1(
        base=Lit(1),
        step=Comp(Basis("s0"), [Var(1)]),
        bound=Lit(1),
    )
    with pytest.raises(BoundViolation):
        eval_term(t, [], [9], bound_mode="strict")


def test_bound_discipline_observed_at_every_step():
    seen = []

    def observer(node, y, value, kval):
        seen.append((y, value, kval))
        assert bitlen(value) <= bitlen(kval)

    t = Lrn1(
        base=Lit(0),
        step=Comp(ADD, [Var(1), Lit(1)]),
        bound=Comp(ADD, [Var(0), Lit(1)]),
    )
    eval_term(t, [], [13], recursion_observer=observer)
    assert [y for (y, _, _) in seen] == [0, 1, 3, 6, 13]


def test_expand_ignores_trailing_arguments():
    t = Expand(Comp(SMASH, [Proj(2, 1), Proj(2, 2)]), 1, 1)
    f = Oracle({}, default=77)
    assert eval_term(t, [f], [2, 3, 999]) == 16
    assert f.query_log == []


def test_fuel_exhaustion():
    t = Lrn1(
        base=Lit(0),
        step=Comp(ADD, [Var(1), Lit(1)]),
        bound=Comp(ADD, [Var(0), Lit(1)]),
    )
    with pytest.raises(FuelExhausted):
        eval_term(t, [], [2**40 - 1], fuel=10)


# ---------------------------------------------------------------------------
# ledger and determinism properties


def length_term():
    return Lrn1(
        base=Lit(0),
        step=Comp(ADD, [Var(1), Lit(1)]),
        bound=Comp(ADD, [Var(0), Lit(1)]),
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1023), st.integers(0, 255))
def test_eval_is_deterministic_with_identical_ledgers(y, key_val):
    f = Oracle({3: key_val}, default=1)
    t = Comp(ADD, [Ap(0, Var(0)), length_term()])
    l1, l2 = CostLedger(), CostLedger()
    f.clear_log()
    v1 = eval_term(t, [f], [y], ledger=l1)
    log1 = list(f.query_log)
    f.clear_log()
    v2 = eval_term(t, [f], [y], ledger=l2)
    assert v1 == v2
    assert l1 == l2
    assert log1 == f.query_log


def test_ledger_counters_monotone_and_query_total():
    f = Oracle({1: 4, 2: 9}, default=0)
    g = Oracle({}, default=3)
    t = Comp(ADD, [Ap(0, Var(0)), Ap(1, Var(1))])
    ledger = CostLedger(builtin_steps=7)
    f.clear_log(), g.clear_log()
    eval_term(t, [f, g], [1, 2], ledger=ledger)
    assert ledger.builtin_steps >= 7
    assert ledger.oracle_queries == len(f.query_log) + len(g.query_log) == 2
    assert ledger.kc_oracle_cost == bitlen(4) + bitlen(3)
    assert ledger.peak_value_bits >= bitlen(4 + 3)


def test_query_log_replay_reproduces_output():
    # restrict each oracle to its logged points: the replay must agree
    f = Oracle({i: (i * 7) % 13 for i in range(16)}, default=2)
    t = Comp(ADD, [Ap(0, Ap(0, Var(0))), Ap(0, Var(1))])
    f.clear_log()
    want = eval_term(t, [f], [3, 5])
    restricted = f.restricted(f.query_log)
    assert eval_term(t, [restricted], [3, 5]) == want


def test_kc_cost_counts_zero_answers_as_free():
    f = Oracle({}, default=0)
    ledger = CostLedger()
    eval_term(Ap(0, Var(0)), [f], [9], ledger=ledger)
    assert ledger.oracle_queries == 1
    assert ledger.kc_oracle_cost == 0


def test_lrn_step_receives_the_halved_prefix():
    # both branches return their notation argument: F(y) = floor(y/2)
    t = Lrn(base=Lit(0), even=Var(0), odd=Var(0), bound=Proj(1, 1))
    for y in range(1, 256):
        assert eval_term(t, [], [y]) == y >> 1
    assert eval_term(t, [], [0]) == 0


def test_lrn1_step_receives_the_argument_itself():
    t = Lrn1(base=Lit(0), step=Var(0), bound=Proj(1, 1))
    for y in range(1, 256):
        assert eval_term(t, [], [y]) == y


@given(st.integers(0, 2**20), st.integers(0, 40))
def test_msp_satisfies_its_defining_axioms(x, y):
    # x taken to 0 bits is 0; x of at least 1 taken to 1 bit is 1;
    # below the length one more bit then halving recovers the prefix;
    # at or beyond the length the whole number comes back
    assert eval_builtin("msp", [x, 0]) == 0
    if x >= 1:
        assert eval_builtin("msp", [x, 1]) == 1
    if y < bitlen(x):
        assert eval_builtin("msp", [x, y]) == eval_builtin("msp", [x, y + 1]) // 2
    if y >= bitlen(x):
        assert eval_builtin("msp", [x, y]) == x
