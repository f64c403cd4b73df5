"""Textual file formats: s-expression terms and polynomials, oracle tables.

Term grammar: atoms `o s0 s1 add mul len half msp monus min smash condle`,
`(proj n k)`, `(x i)` for number argument i, decimal naturals as constant
functionals, `(ap j <t>)`, `(comp <h> <g1> ... <gm>)`, `(expand <t> k l)`,
`(lrn :g <t> :h1 <t> :h2 <t> :k <t>)`, `(lrn1 :g <t> :h <t> :k <t>)`.

Polynomial grammar: `(c n)`, `(lx i)`, `(+ P Q)`, `(* P Q)`, `(nf j P)`.

Scheme grammar: `(mlrn :g1 <t> :h1 <t> :k1 <t> :g2 ... )` for any number of
numbered components, `(pbrn :g <t> :h <t> :q <sop>)`, and
`(pbrpl :g <t> :h <t> :p <sop> :q <sop>)`.

Oracle files: a header line `default <v>` followed by one `key value` pair
per line; blank lines and `#` comments are ignored.
"""

from __future__ import annotations

from typing import Sequence, Union

from .errors import SexprError
from . import terms
from .schemes import MlrnSystem, PbrplSystem
from .sop import Const, LenVar, NormApp, Plus, Sop, Times
from .terms import Oracle, Term

Node = Union[str, list]


def read_sexprs(text: str) -> list[Node]:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def read_one() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise SexprError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(read_one())
            if pos >= len(tokens):
                raise SexprError("missing closing parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise SexprError("unexpected closing parenthesis")
        return tok

    out = []
    while pos < len(tokens):
        out.append(read_one())
    return out


def read_sexpr(text: str) -> Node:
    nodes = read_sexprs(text)
    if len(nodes) != 1:
        raise SexprError(f"expected one expression, found {len(nodes)}")
    return nodes[0]


def _nat(tok: Node, what: str) -> int:
    if isinstance(tok, str) and tok.isdigit():
        return int(tok)
    raise SexprError(f"expected a natural for {what}, got {tok!r}")


def _keyworded(items: Sequence[Node], head: str) -> dict[str, Node]:
    if len(items) % 2:
        raise SexprError(f"{head}: keyword arguments must come in pairs")
    out: dict[str, Node] = {}
    for key, value in zip(items[::2], items[1::2]):
        if not isinstance(key, str) or not key.startswith(":"):
            raise SexprError(f"{head}: expected a keyword, got {key!r}")
        if key in out:
            raise SexprError(f"{head}: duplicate keyword {key}")
        out[key[1:]] = value
    return out


def _need(kw: dict[str, Node], head: str, *names: str) -> list[Node]:
    missing = [n for n in names if n not in kw]
    if missing:
        raise SexprError(f"{head}: missing keywords {missing}")
    extra = [n for n in kw if n not in names]
    if extra:
        raise SexprError(f"{head}: unknown keywords {extra}")
    return [kw[n] for n in names]


# ---------------------------------------------------------------------------
# Terms


def term_from_node(node: Node) -> Term:
    if isinstance(node, str):
        if node in terms.BUILTINS:
            return terms.Basis(node)
        if node.isdigit():
            return terms.Lit(int(node))
        raise SexprError(f"unknown term atom {node!r}")
    if not node:
        raise SexprError("empty term")
    head = node[0]
    if not isinstance(head, str):
        raise SexprError(f"term head must be an atom, got {head!r}")
    body = node[1:]
    if head == "proj":
        if len(body) != 2:
            raise SexprError("(proj n k) takes two naturals")
        return terms.Proj(_nat(body[0], "proj arity"), _nat(body[1], "proj index"))
    if head == "x":
        if len(body) != 1:
            raise SexprError("(x i) takes one natural")
        return terms.Var(_nat(body[0], "variable index"))
    if head == "ap":
        if len(body) != 2:
            raise SexprError("(ap j <term>) takes an oracle index and a term")
        return terms.Ap(_nat(body[0], "oracle index"), term_from_node(body[1]))
    if head == "comp":
        if not body:
            raise SexprError("(comp <h> ...) needs a head term")
        return terms.Comp(term_from_node(body[0]), [term_from_node(b) for b in body[1:]])
    if head == "expand":
        if len(body) != 3:
            raise SexprError("(expand <t> k l) takes a term and two naturals")
        return terms.Expand(
            term_from_node(body[0]),
            _nat(body[1], "added functions"),
            _nat(body[2], "added numbers"),
        )
    if head == "lrn":
        g, h1, h2, k = _need(_keyworded(body, "lrn"), "lrn", "g", "h1", "h2", "k")
        return terms.Lrn(
            term_from_node(g), term_from_node(h1), term_from_node(h2), term_from_node(k)
        )
    if head == "lrn1":
        g, h, k = _need(_keyworded(body, "lrn1"), "lrn1", "g", "h", "k")
        return terms.Lrn1(term_from_node(g), term_from_node(h), term_from_node(k))
    raise SexprError(f"unknown term form {head!r}")


def parse_term(text: str) -> Term:
    return term_from_node(read_sexpr(text))


def term_to_sexpr(t: Term) -> str:
    if isinstance(t, terms.Basis):
        return t.name
    if isinstance(t, terms.Lit):
        return str(t.value)
    if isinstance(t, terms.Proj):
        return f"(proj {t.arity} {t.index})"
    if isinstance(t, terms.Var):
        return f"(x {t.index})"
    if isinstance(t, terms.Ap):
        return f"(ap {t.oracle} {term_to_sexpr(t.arg)})"
    if isinstance(t, terms.Comp):
        inner = " ".join(term_to_sexpr(g) for g in t.args)
        return f"(comp {term_to_sexpr(t.head)}{' ' + inner if inner else ''})"
    if isinstance(t, terms.Expand):
        return f"(expand {term_to_sexpr(t.inner)} {t.add_fns} {t.add_args})"
    if isinstance(t, terms.Lrn):
        return (
            f"(lrn :g {term_to_sexpr(t.base)} :h1 {term_to_sexpr(t.even)}"
            f" :h2 {term_to_sexpr(t.odd)} :k {term_to_sexpr(t.bound)})"
        )
    if isinstance(t, terms.Lrn1):
        return (
            f"(lrn1 :g {term_to_sexpr(t.base)} :h {term_to_sexpr(t.step)}"
            f" :k {term_to_sexpr(t.bound)})"
        )
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Polynomials


def sop_from_node(node: Node) -> Sop:
    if isinstance(node, str) or not node:
        raise SexprError(f"bad polynomial {node!r}")
    head = node[0]
    body = node[1:]
    if head == "c":
        if len(body) != 1:
            raise SexprError("(c n) takes one natural")
        return Const(_nat(body[0], "constant"))
    if head == "lx":
        if len(body) != 1:
            raise SexprError("(lx i) takes one natural")
        return LenVar(_nat(body[0], "length variable"))
    if head in ("+", "*"):
        if len(body) != 2:
            raise SexprError(f"({head} P Q) takes two polynomials")
        cls = Plus if head == "+" else Times
        return cls(sop_from_node(body[0]), sop_from_node(body[1]))
    if head == "nf":
        if len(body) != 2:
            raise SexprError("(nf j P) takes an oracle index and a polynomial")
        return NormApp(_nat(body[0], "norm variable"), sop_from_node(body[1]))
    raise SexprError(f"unknown polynomial form {head!r}")


def parse_sop(text: str) -> Sop:
    return sop_from_node(read_sexpr(text))


def sop_to_sexpr(p: Sop) -> str:
    if isinstance(p, Const):
        return f"(c {p.value})"
    if isinstance(p, LenVar):
        return f"(lx {p.index})"
    if isinstance(p, Plus):
        return f"(+ {sop_to_sexpr(p.left)} {sop_to_sexpr(p.right)})"
    if isinstance(p, Times):
        return f"(* {sop_to_sexpr(p.left)} {sop_to_sexpr(p.right)})"
    if isinstance(p, NormApp):
        return f"(nf {p.oracle} {sop_to_sexpr(p.arg)})"
    raise TypeError(f"not a polynomial: {p!r}")


# ---------------------------------------------------------------------------
# Oracles


def parse_oracle(text: str) -> Oracle:
    default = 0
    saw_default = False
    table: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "default":
            if len(parts) != 2 or not parts[1].isdigit():
                raise SexprError(f"line {lineno}: default needs one natural")
            default = int(parts[1])
            saw_default = True
            continue
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise SexprError(f"line {lineno}: expected 'key value'")
        key = int(parts[0])
        if key in table:
            raise SexprError(f"line {lineno}: duplicate key {key}")
        table[key] = int(parts[1])
    if not saw_default and not table:
        raise SexprError("empty oracle file")
    return Oracle(table, default=default)


def oracle_to_text(f: Oracle) -> str:
    lines = [f"default {f.default}"]
    lines += [f"{k} {v}" for k, v in sorted(f.table.items())]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Scheme files


def parse_scheme(text: str):
    """Parse a scheme file into ("mlrn", MlrnSystem) / ("pbrn", (base,
    step, bound)) / ("pbrpl", PbrplSystem)."""
    node = read_sexpr(text)
    if isinstance(node, str) or not node:
        raise SexprError(f"bad scheme {node!r}")
    head, body = node[0], node[1:]
    if head == "mlrn":
        kw = _keyworded(body, "mlrn")
        count = 0
        while f"g{count + 1}" in kw:
            count += 1
        if count < 1:
            raise SexprError("mlrn: need components :g1 :h1 :k1 ...")
        names = [f"{p}{i}" for i in range(1, count + 1) for p in ("g", "h", "k")]
        parts = _need(kw, "mlrn", *names)
        base_terms = [term_from_node(parts[3 * i]) for i in range(count)]
        step_terms = [term_from_node(parts[3 * i + 1]) for i in range(count)]
        bound_terms = [term_from_node(parts[3 * i + 2]) for i in range(count)]
        return "mlrn", MlrnSystem.from_terms(base_terms, step_terms, bound_terms)
    if head == "pbrn":
        g, h, q = _need(_keyworded(body, "pbrn"), "pbrn", "g", "h", "q")
        return "pbrn", (term_from_node(g), term_from_node(h), sop_from_node(q))
    if head == "pbrpl":
        g, h, p, q = _need(_keyworded(body, "pbrpl"), "pbrpl", "g", "h", "p", "q")
        return "pbrpl", PbrplSystem(
            base=term_from_node(g),
            step=term_from_node(h),
            length_bound=sop_from_node(p),
            value_bound=sop_from_node(q),
        )
    raise SexprError(f"unknown scheme form {head!r}")
