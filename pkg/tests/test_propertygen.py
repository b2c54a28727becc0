from __future__ import annotations

import os
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, corpus_path, data_path, load, read
from finverif.cli.corpus import load_manifest
from finverif.frontend import parse_contract, parse_source
from finverif.propertygen import (ContractCategory, Equivalence, Invariant, KeyVariables,
                                  NoPropertyApplicable, classify, find_key_variables,
                                  generate_properties, name_similarity, parse_custom_invariant,
                                  ratio)

Cat = ContractCategory


# ---------------------------------------------------------------- classification

def test_ex1_is_a_token_contract():
    _, ast, _, _ = load(corpus_path("ex1.sol"))
    assert classify(ast) == {Cat.TOKEN_CONTRACT}


def test_plain_storage_is_other():
    c = parse_contract("contract C { uint s; function f(uint v) public { s = v; } }")
    assert classify(c) == {Cat.OTHER}


def test_ico_sale_manages_its_token():
    asts, ast, _, props = load(corpus_path("ico.sol"), "Sale")
    assert classify(ast, asts) == {Cat.TOKEN_MANAGING}
    assert classify(asts[0], asts) == {Cat.TOKEN_CONTRACT}
    (eq,) = props
    assert eq == Equivalence("Sale", (("Token", "balances"),), ether=False)


def test_payable_function_is_ether_related():
    c = parse_contract("contract C { uint s; function f() public payable { s = 1; } }")
    assert classify(c) == {Cat.ETHER_RELATED}


def test_helper_used_by_a_token_is_indirect():
    src = """contract Auth { uint n; function check() public { n = n + 1; } }
             contract T { mapping(address => uint) balances; Auth auth;
                 function give(address a) public { auth.check(); balances[a] = 1; } }"""
    asts = parse_source(src)
    assert classify(asts[0], asts) == {Cat.INDIRECT_RELATED}
    assert classify(asts[0]) == {Cat.OTHER}
    with pytest.raises(NoPropertyApplicable):
        generate_properties(asts[0], find_key_variables(asts[0]), classify(asts[0], asts))


def test_corpus_categories_match_manifest():
    manifest = load_manifest(os.path.join(CORPUS, "manifest.txt"))
    for e in manifest.entries:
        asts, ast, _, _ = load(e.path, e.contract)
        got = sorted(c.value for c in classify(ast, asts))
        assert tuple(got) == e.categories, e.path


# ---------------------------------------------------------------- similarity

@pytest.mark.parametrize("a, b, want", [
    ("balances", "Balances", 100.0),
    ("balanceOf", "balances", 99.99),
    ("_balances", "balances", 99.99),
    ("totalSupply", "total_supply", 99.99),
    ("owner", "balances", 100 * 2 * 2 / 12),
    ("credits", "balances", 40.0),
])
def test_similarity_examples(a, b, want):
    assert name_similarity(a, b) == pytest.approx(want)


@lru_cache(maxsize=None)
def _lcs(a: str, b: str) -> int:
    # textbook recursion, independent of the iterative table
    if not a or not b:
        return 0
    if a[0] == b[0]:
        return 1 + _lcs(a[1:], b[1:])
    return max(_lcs(a[1:], b), _lcs(a, b[1:]))


_names = st.text(alphabet="abAB_sof1", min_size=0, max_size=8)


@settings(max_examples=300, deadline=None)
@given(a=_names, b=_names)
def test_ratio_matches_recursive_lcs(a, b):
    want = 100.0 if not a and not b else 200.0 * _lcs(a, b) / (len(a) + len(b))
    assert ratio(a, b) == pytest.approx(want)


@settings(max_examples=300, deadline=None)
@given(a=_names.filter(bool), b=_names.filter(bool))
def test_similarity_is_symmetric_and_bounded(a, b):
    s = name_similarity(a, b)
    assert s == name_similarity(b, a)
    assert 0.0 <= s <= 100.0
    assert (s == 100.0) == (a.lower() == b.lower())


@given(a=_names.filter(bool))
def test_similarity_of_a_name_with_itself(a):
    assert name_similarity(a, a) == 100.0
    assert name_similarity(a, a.swapcase()) == 100.0


# ---------------------------------------------------------------- key variables

_TWO_MAPS = """contract C {
    mapping(address => uint) balanceOf;
    mapping(address => uint) credits;
    uint totalSupply;
    uint owner;
    function f(address a) public { balanceOf[a] = 1; credits[a] = 2; }
}"""


def test_key_variables_by_name():
    kv = find_key_variables(parse_contract(_TWO_MAPS))
    assert kv == KeyVariables(("balanceOf",), "totalSupply", None)


def test_key_variable_override():
    kv = find_key_variables(parse_contract(_TWO_MAPS), overrides=["credits"])
    assert kv.balances_vars == ("credits",)
    assert kv.user_overrides == ("credits",)


def test_override_of_unknown_name_is_dropped():
    kv = find_key_variables(parse_contract(_TWO_MAPS), overrides=["nope"])
    assert kv.balances_vars == ()


@given(lo=st.integers(0, 100), hi=st.integers(0, 100))
def test_threshold_is_monotone(lo, hi):
    lo, hi = min(lo, hi), max(lo, hi)
    c = parse_contract(_TWO_MAPS)
    assert set(find_key_variables(c, hi).balances_vars) <= set(find_key_variables(c, lo).balances_vars)


# ---------------------------------------------------------------- property generation

def test_ex1_invariant_terms():
    _, _, _, props = load(corpus_path("ex1.sol"))
    inv = next(p for p in props if isinstance(p, Invariant))
    assert inv.name == "token_inv(balances)"
    assert [t.text for t in inv.terms] == ["balances[msg.sender]", "balances[to]"]
    assert inv.rhs == "C1"
    assert inv.describe() == "balances[msg.sender] + balances[to] == C1"
    assert inv.terms_of("Ex1", "transfer") == list(inv.terms)
    assert inv.terms_of("Ex1", "other") == []


def test_total_supply_becomes_the_right_hand_side():
    c = parse_contract(_TWO_MAPS)
    (inv, eq) = generate_properties(c, find_key_variables(c), classify(c))
    assert inv.rhs == "totalSupply"
    assert eq.token_vars == (("C", "balanceOf"),)


def test_other_contract_has_no_property():
    c = parse_contract("contract C { uint s; function f(uint v) public { s = v; } }")
    with pytest.raises(NoPropertyApplicable):
        generate_properties(c, find_key_variables(c), classify(c))


def test_ex2_has_no_property():
    asts = parse_source(read(data_path("ex2.sol")))
    with pytest.raises(NoPropertyApplicable):
        generate_properties(asts[0], find_key_variables(asts[0]), classify(asts[0]))


@pytest.mark.parametrize("name", sorted(n for n in os.listdir(CORPUS) if n.endswith(".sol")))
def test_generated_invariants_have_terms(name):
    _, _, _, props = load(corpus_path(name))
    assert props
    for p in props:
        if isinstance(p, Invariant):
            assert p.terms


def test_custom_invariant():
    c = parse_contract(_TWO_MAPS)
    inv = parse_custom_invariant("sum(credits[a], credits[msg.sender]) == 10", c)
    assert (inv.var, inv.constant, inv.custom) == ("credits", 10, True)
    assert inv.terms_of("C", "anything") == list(inv.terms)
    inv = parse_custom_invariant("sum(balanceOf[a]) == totalSupply", c)
    assert inv.rhs == "totalSupply"


@pytest.mark.parametrize("text", [
    "credits[a] == 1",
    "sum(credits[a], balanceOf[a]) == 1",
    "sum(owner[a]) == 1",
    "sum(credits[a]) == nobody",
    "sum() == 1",
])
def test_bad_custom_invariants(text):
    with pytest.raises(ValueError):
        parse_custom_invariant(text, parse_contract(_TWO_MAPS))
