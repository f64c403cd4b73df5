import pytest

from bfflab.errors import SexprError
from bfflab.fixture_access import fixture_text, list_fixtures
from bfflab.formats import (
    oracle_to_text,
    parse_oracle,
    parse_scheme,
    parse_sop,
    parse_term,
    sop_to_sexpr,
    term_to_sexpr,
)
from bfflab.sop import Const, LenVar, NormApp, Plus
from bfflab import terms
from bfflab.terms import Oracle, eval_term, validate_term


def test_parse_atoms_and_literals():
    assert parse_term("o") == terms.Basis("o")
    assert parse_term("7") == terms.Lit(7)
    assert parse_term("(x 2)") == terms.Var(2)
    assert parse_term("(proj 3 2)") == terms.Proj(3, 2)


def test_parse_smash_fixture():
    t = parse_term(fixture_text("smash.bff"))
    assert validate_term(t, (0, 2)) == []
    assert eval_term(t, [], [2, 3]) == 16


def test_parse_length_fixture():
    t = parse_term(fixture_text("length.bff"))
    assert eval_term(t, [], [13]) == 4


def test_parse_lrn_keywords_any_order():
    a = parse_term("(lrn1 :g 0 :h (comp add (x 1) 1) :k (comp add (x 0) 1))")
    b = parse_term("(lrn1 :k (comp add (x 0) 1) :g 0 :h (comp add (x 1) 1))")
    assert a == b


def test_parse_rejects_missing_keyword():
    with pytest.raises(SexprError):
        parse_term("(lrn1 :g 0 :h (x 0))")


def test_parse_rejects_unknown_atom():
    with pytest.raises(SexprError):
        parse_term("frobnicate")


def test_term_roundtrip():
    src = "(lrn :g 0 :h1 (comp s0 (x 1)) :h2 (comp s1 (x 1)) :k (proj 1 1))"
    t = parse_term(src)
    assert parse_term(term_to_sexpr(t)) == t
    u = parse_term("(expand (ap 0 (x 0)) 1 2)")
    assert parse_term(term_to_sexpr(u)) == u


def test_sop_roundtrip_and_fixture():
    p = parse_sop(fixture_text("norm_depth1.sop"))
    assert p == NormApp(0, LenVar(0))
    q = parse_sop("(+ (* (lx 0) (lx 1)) (c 1))")
    assert parse_sop(sop_to_sexpr(q)) == q


def test_parse_oracle_file():
    f = parse_oracle(fixture_text("f35.orc"))
    assert f.peek(3) == 5
    assert f.peek(4) == 0
    g = parse_oracle("default 2\n7 9\n")
    assert g.peek(1) == 2 and g.peek(7) == 9


def test_parse_oracle_rejects_duplicates_and_garbage():
    with pytest.raises(SexprError):
        parse_oracle("default 0\n3 5\n3 6\n")
    with pytest.raises(SexprError):
        parse_oracle("default 0\nnot numbers\n")


def test_oracle_text_roundtrip():
    f = Oracle({9: 1, 2: 8}, default=3)
    assert parse_oracle(oracle_to_text(f)).table == f.table


def test_parse_mlrn_scheme_fixture():
    kind, system = parse_scheme(fixture_text("length_power.mlrn"))
    assert kind == "mlrn"
    assert system.size == 2


def test_parse_pbrn_scheme_fixture():
    kind, (base, step, bound) = parse_scheme(fixture_text("length.pbrn"))
    assert kind == "pbrn"
    assert bound == Plus(LenVar(0), Const(1))


def test_parse_pbrpl_scheme_fixture():
    kind, system = parse_scheme(fixture_text("chain.pbrpl"))
    assert kind == "pbrpl"
    assert system.value_bound == Const(3)


def test_all_bundled_fixtures_parse():
    for name in list_fixtures():
        text = fixture_text(name)
        if name.endswith(".bff"):
            parse_term(text)
        elif name.endswith(".sop"):
            parse_sop(text)
        elif name.endswith(".orc"):
            parse_oracle(text)
        elif name.endswith((".mlrn", ".pbrn", ".pbrpl")):
            parse_scheme(text)
