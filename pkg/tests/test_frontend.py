from __future__ import annotations

import glob
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, corpus_path, read
from finverif.frontend import (BoundExceeded, SolSyntaxError, UnboundedLoop, UnsupportedFeature,
                               check_support, has_loops, parse_contract, parse_source,
                               pretty_source, unroll_loops)
from finverif.frontend import ast as A

MOD = 2 ** 256


def test_ex1_ast():
    c = parse_contract(read(corpus_path("ex1.sol")))
    assert c.name == "Ex1"
    assert [g.name for g in c.globals] == ["balances"]
    assert c.globals[0].ty == A.Mapping(A.Address(), A.UInt())
    fn = c.function("transfer")
    assert fn.params == (("to", A.Address()), ("value", A.UInt()))


def test_empty_input_is_syntax_error_at_origin():
    with pytest.raises(SolSyntaxError) as err:
        parse_source("")
    assert (err.value.line, err.value.col) == (1, 1)


def test_while_with_parameter_bound_is_unsupported():
    src = "contract C { function f(uint n) public { uint x = 0; while (x < n) { x = x + 1; } } }"
    with pytest.raises(UnsupportedFeature) as err:
        parse_source(src)
    assert "loop" in err.value.message


@pytest.mark.parametrize("src, what", [
    ("contract C { uint a; uint a; }", "duplicate global"),
    ("contract C { function f() public {} function f() public {} }", "duplicate function"),
    ("contract C { constructor() public {} constructor() public {} }", "constructor"),
    ("contract C { function f() public { x = ; } }", "expected"),
])
def test_declaration_errors(src, what):
    with pytest.raises(SolSyntaxError) as err:
        parse_source(src)
    assert what in err.value.message


def test_creation_outside_constructor_is_unsupported():
    src = "contract D {} contract C { D d; function f() public { d = new D(); } }"
    with pytest.raises(UnsupportedFeature):
        parse_source(src)


def test_diagnostic_rendering():
    with pytest.raises(UnsupportedFeature) as err:
        parse_source("contract C {\n  function f(int x) public {}\n}")
    text = err.value.diagnostic.render("c.sol")
    assert text.startswith("c.sol:2:")
    assert ": error: " in text


def test_trailing_return_is_synthesized_on_every_path():
    src = """contract C {
        uint s;
        function f(uint x) public {
            if (x > 1) { s = 1; } else { s = 2; return; }
        }
    }"""
    fn = parse_contract(src).function("f")

    def ends_in_return(stmts):
        last = stmts[-1]
        if isinstance(last, A.Return):
            return True
        return isinstance(last, A.If) and ends_in_return(last.then) and ends_in_return(last.else_)
    assert ends_in_return(fn.body)


def test_visibility_is_recorded():
    c = parse_contract("contract C { uint s; function f() internal { s = 1; } }")
    assert c.function("f").visibility == "internal"


# ---------------------------------------------------------------- loop unrolling

def test_unroll_constant_loop():
    src = "contract C { uint s; function f() public { for (uint i = 0; i < 2; i++) { s = s + i; } } }"
    c = unroll_loops(parse_contract(src), 8)
    body = c.function("f").body
    assert not has_loops(c)
    assert body[:2] == (
        A.Assign(A.Ident("s"), A.BinOp("+", A.Ident("s"), A.Num(0))),
        A.Assign(A.Ident("s"), A.BinOp("+", A.Ident("s"), A.Num(1))),
    )


def test_unroll_parameter_bound_is_unbounded():
    src = "contract C { function f(uint n) public { for (uint i = 0; i < n; i++) { } } }"
    with pytest.raises(UnboundedLoop):
        unroll_loops(parse_contract(src), 8)


def test_unroll_bound_exceeded():
    src = "contract C { uint s; function f() public { for (uint i = 0; i < 10; i++) { s = s + 1; } } }"
    c = parse_contract(src)
    with pytest.raises(BoundExceeded):
        unroll_loops(c, 4)
    assert not has_loops(unroll_loops(c, 10))


class _Interp:
    """Straight evaluation of loop-bearing bodies over scalar uint names."""

    def __init__(self, store):
        self.store = dict(store)

    def expr(self, e):
        if isinstance(e, A.Num):
            return e.value
        if isinstance(e, A.Ident):
            return self.store[e.name]
        l, r = self.expr(e.left), self.expr(e.right)
        return {"+": (l + r) % MOD, "-": (l - r) % MOD, "*": (l * r) % MOD,
                "<": int(l < r), "<=": int(l <= r), ">": int(l > r),
                "!=": int(l != r), "==": int(l == r)}[e.op]

    def run(self, stmts):
        for s in stmts:
            if isinstance(s, A.Return):
                return
            if isinstance(s, A.Declare):
                self.store[s.name] = self.expr(s.rhs) if s.rhs is not None else 0
            elif isinstance(s, A.Assign):
                self.store[s.lhs.name] = self.expr(s.rhs)
            elif isinstance(s, A.If):
                self.run(s.then if self.expr(s.cond) else s.else_)
            elif isinstance(s, A.Loop):
                self.run((s.init,))
                while self.expr(s.cond):
                    self.run(s.body)
                    self.run((s.step,))
            else:
                raise AssertionError(s)


_BODY_OPS = st.lists(st.tuples(st.sampled_from(["s", "t"]), st.sampled_from(["+", "-", "*"]),
                               st.sampled_from(["i", "1", "2", "s", "t"])), min_size=1, max_size=3)


@settings(max_examples=150, deadline=None)
@given(start=st.integers(0, 3), limit=st.integers(0, 6), step=st.sampled_from([1, 2]),
       rel=st.sampled_from(["<", "<=", "!="]), ops=_BODY_OPS,
       s0=st.integers(0, 5), t0=st.integers(0, 5))
def test_unrolled_body_matches_loop_semantics(start, limit, step, rel, ops, s0, t0):
    if rel == "!=" and (limit < start or (limit - start) % step):
        limit = start   # keep the loop finite
    body = " ".join(f"{x} = {x} {op} {y};" for x, op, y in ops)
    src = (f"contract C {{ uint s; uint t; function f() public {{ "
           f"for (uint i = {start}; i {rel} {limit}; i += {step}) {{ {body} }} }} }}")
    c = parse_contract(src)
    flat = unroll_loops(c, 8)
    assert not has_loops(flat)
    before = _Interp({"s": s0, "t": t0})
    before.run(c.function("f").body)
    after = _Interp({"s": s0, "t": t0})
    after.run(flat.function("f").body)
    assert (before.store["s"], before.store["t"]) == (after.store["s"], after.store["t"])


# ---------------------------------------------------------------- support checks

def test_check_support_examples():
    ex1 = parse_contract(read(corpus_path("ex1.sol")))
    assert check_support(ex1, {"Ex1"}) == []
    unknown = parse_source("contract C { function f(address a) public { Unknown(a).f(); } }")[0]
    assert len(check_support(unknown, {"C"})) == 1
    src = "contract Token {} contract Sale { Token t; constructor() public { t = new Token(); } }"
    sale = parse_source(src)[-1]
    assert sale.created_contracts == ("Token",)
    assert check_support(sale, {"Token", "Sale"}) == []
    assert len(check_support(sale, {"Sale"})) == 1


_CALLER = """contract C {
    function f(address p) public { A(p).g(); B(p).g(); X(msg.sender).g(); }
}"""


@given(st.sets(st.sampled_from(["A", "B", "X", "Y"])), st.sets(st.sampled_from(["A", "B", "X", "Y"])))
def test_check_support_is_monotone(known, extra):
    c = parse_source(_CALLER)[0]
    small = check_support(c, known)
    large = check_support(c, known | extra)
    assert set(large) <= set(small)


# ---------------------------------------------------------------- pretty-print round trip

@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CORPUS, "*.sol"))),
                         ids=os.path.basename)
def test_corpus_round_trip(path):
    first = parse_source(read(path))
    again = parse_source(pretty_source(first))
    assert again == first
    assert parse_source(pretty_source(again)) == again


_EXPRS = st.recursive(
    st.sampled_from(["x", "y", "1", "7", "s", "m[msg.sender]", "block.timestamp"]),
    lambda inner: st.tuples(inner, st.sampled_from(["+", "-", "*", "/", "%"]), inner)
    .map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
    max_leaves=6)


@settings(max_examples=100, deadline=None)
@given(lhs=st.sampled_from(["s", "m[to]"]), rhs=_EXPRS, cond=_EXPRS,
       rel=st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), guard=st.booleans())
def test_generated_round_trip(lhs, rhs, cond, rel, guard):
    stmt = f"{lhs} = {rhs};"
    if guard:
        stmt = f"if ({cond} {rel} x) {{ {stmt} }} else {{ require(x != y); }}"
    src = (f"contract C {{ uint s; mapping(address => uint) m; "
           f"function f(address to, uint x, uint y) public {{ {stmt} }} }}")
    first = parse_source(src)
    assert parse_source(pretty_source(first)) == first
