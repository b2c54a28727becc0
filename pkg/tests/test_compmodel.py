from __future__ import annotations

import glob
import os

import pytest

from conftest import CORPUS, corpus_path, load, model_for
from finverif.compmodel import (C1, MINER_DRIFT, PHASE_COMPARE, build_invariant_model,
                                compare_rule, index_timestamps, is_inflight, rename_fact,
                                side_name, strip_side)
from finverif.msr import EMPTY, addr, Execution, Fact, Label, Rule, Sort, Var, num
from finverif.msr.engine import Step
from finverif.msr.facts import AnyOf, NumConstraint, PropCheck
from finverif.msr.terms import app

CORPUS_FILES = sorted(glob.glob(os.path.join(CORPUS, "*.sol")))
SHARED = ("init_evars", "init_gvars", "ext_call")


def _kinds(rules):
    return [r.meta.get("kind") for r in rules]


def _with(kind):
    return [p for p in CORPUS_FILES if any(q.kind == kind for q in load(p)[3])]


# ---------------------------------------------------------------- naming

@pytest.mark.parametrize("name, side, want", [
    ("Var_11", "A", "Var_A11"),
    ("Call_e", "B", "Call_Be"),
    ("Call_in", "A", "Call_Ain"),
    ("Gvar", "B", "Gvar_B"),
    ("Fr", "A", "Fr"),
    ("Gvar", "", "Gvar"),
])
def test_side_names(name, side, want):
    assert side_name(name, side) == want
    assert strip_side(want, side) == name


def test_inflight_classification():
    assert is_inflight("Var_A1", "A") and not is_inflight("Var_A1", "B")
    assert is_inflight("Return_B", "B")
    assert not is_inflight("Gvar_A", "A")
    assert is_inflight("Call_in") and not is_inflight("Call_e")


# ---------------------------------------------------------------- equivalence model

@pytest.mark.parametrize("path", _with("equivalence"), ids=os.path.basename)
def test_equivalence_rule_count(path):
    _, _, indep, _ = load(path)
    model = model_for(path, "equivalence")
    kinds = _kinds(indep.rules)
    shared = sum(k in SHARED for k in kinds)
    assert len(model.rules) == 2 * (len(kinds) - shared) + shared + 1


@pytest.mark.parametrize("path", _with("equivalence"), ids=os.path.basename)
def test_copies_are_symmetric(path):
    model = model_for(path, "equivalence")
    a, b = model.side_rules("A"), model.side_rules("B")
    assert len(a) == len(b) > 0
    for ra, rb in zip(a, b):
        assert ra.meta["uid"][:-2] == rb.meta["uid"][:-2]
        back_a = [strip_side(f.name, "A") for f in ra.premise + ra.conclusion]
        back_b = [strip_side(f.name, "B") for f in rb.premise + rb.conclusion]
        assert back_a == back_b
        assert [f.args for f in ra.premise] == [
            f.args for f in rb.premise] or ra.meta["kind"] == "recv_ext"


def test_exactly_one_compare_rule():
    model = model_for(corpus_path("reentrancy.sol"), "equivalence")
    (cmp,) = [r for r in model.rules if r.meta["kind"] == "compare_AB"]
    assert cmp.meta["phase"] == PHASE_COMPARE
    names = [f.name for f in cmp.premise]
    assert names == ["Gvar_A", "Evar_A", "Gvar_B", "Evar_B"]
    # the comparison leaves the state as it found it
    assert cmp.conclusion == cmp.premise
    (choice, end) = cmp.actions
    assert isinstance(choice, AnyOf) and len(choice.options) == 2
    assert end == Label("End")


def test_compare_rule_watches_the_token_of_the_managed_contract():
    _, _, indep, props = load(corpus_path("ico.sol"), "Sale")
    (eq,) = props
    cmp = compare_rule(indep, eq)
    (choice, _) = cmp.actions
    (opt,) = choice.options
    assert str(opt) == "NeqNum(σv(balances_A)[σa(c_adv)], σv(balances_B)[σa(c_adv)])"
    assert [f.args[0] for f in cmp.premise if f.name == "Gvar_A"] == [addr("Token"), addr("Sale")]


def test_timestamp_contract_hands_each_copy_a_block_time():
    model = model_for(corpus_path("ex3_dice.sol"), "equivalence")
    assert model.uses_timestamp
    (gen,) = [r for r in model.rules if r.meta["kind"].startswith("ext_call")]
    assert gen.name == "ext_call_bvar_AB"
    assert {f.name for f in gen.conclusion} == {"Bvar_A", "Bvar_B", "Call_Ae", "Call_Be"}
    for side in "AB":
        (recv,) = [r for r in model.side_rules(side) if r.meta["kind"] == "recv_ext"]
        assert f"Bvar_{side}" in [f.name for f in recv.premise]
        assert Label(f"Exc_{side}", recv.premise[0].args) in recv.actions


def test_no_timestamp_no_bvar():
    model = model_for(corpus_path("reentrancy.sol"), "equivalence")
    names = {f.name for r in model.rules for f in r.premise + r.conclusion}
    assert not any(n.startswith("Bvar") for n in names)


# ---------------------------------------------------------------- invariant model

@pytest.mark.parametrize("path", _with("invariant"), ids=os.path.basename)
def test_start_only_on_transaction_generators(path):
    _, _, indep, _ = load(path)
    model = model_for(path, "invariant")
    starts = [r for r in model.rules if Label("Start") in r.actions]
    assert {r.meta["kind"] for r in starts} == {"ext_call_inv"}
    assert sorted((r.meta["contract"], r.meta["fn"]) for r in starts) == \
        sorted(indep.entry_functions)
    assert any(getattr(x, "label", None) == "Start" and not x.per_args
               for x in model.restrictions)


@pytest.mark.parametrize("path", _with("invariant"), ids=os.path.basename)
def test_every_external_return_checks_and_ends(path):
    _, _, indep, _ = load(path)
    model = model_for(path, "invariant")
    assert len(model.rules) == len(indep.rules)
    kinds = _kinds(model.rules)
    assert kinds.count("ret_ext_inv") == _kinds(indep.rules).count("ret_ext")
    for r in model.rules:
        if r.meta["kind"] == "ret_ext_inv":
            check, end = r.actions[-2:]
            assert isinstance(check, PropCheck) and check.kind == "inv_end"
            assert end == Label("End")


def test_ex1_end_check_names_both_indices():
    model = model_for(corpus_path("ex1.sol"), "invariant")
    (ret,) = [r for r in model.rules if r.meta["kind"] == "ret_ext_inv"]
    check = ret.actions[-2]
    _, keys, rhs = check.args
    assert rhs == C1
    assert [str(k[0]) for k in keys] == ["σv(c_b)", "σv(to)"]
    (init,) = [r for r in model.rules if r.meta["kind"] == "init_gvars_inv"]
    assert any(isinstance(a, PropCheck) and a.kind == "inv_init" for a in init.actions)


def test_custom_invariant_is_scoped_to_its_contract():
    from finverif.propertygen import parse_custom_invariant
    asts, ast, indep, _ = load(corpus_path("ico.sol"), "Sale")
    token = asts[0]
    inv = parse_custom_invariant("sum(balances[msg.sender]) == 100", token)
    model = build_invariant_model(indep, inv)
    for r in model.rules:
        if r.meta["kind"] != "ret_ext_inv":
            continue
        check = r.actions[-2]
        if r.meta["contract"] == "Token":
            assert check.args[0] is not None
        else:
            assert check.args[0] is None


# ---------------------------------------------------------------- timestamps

def _bvar_step(side, value):
    v = Var("bt", Sort.NUM)
    rule = Rule("recv", [Fact(f"Bvar_{side}", (v,))], [], [])
    return Step("recv", {v: value}, EMPTY, (), rule)


def test_index_timestamps_orders_each_copy():
    a0, a1, b0, b1 = (Var(n, Sort.NUM) for n in ("a0", "a1", "b0", "b1"))
    trace = Execution(steps=[_bvar_step("A", a0), _bvar_step("B", b0),
                             _bvar_step("A", a1), _bvar_step("B", b1)])
    ts = index_timestamps(trace)
    assert ts.symbols_a == [a0, a1] and ts.symbols_b == [b0, b1]
    assert list(ts) == [
        NumConstraint("lt", a0, a1),
        NumConstraint("lt", b0, b1),
        NumConstraint("le", b0, app("sum", a0, num(MINER_DRIFT))),
        NumConstraint("le", b1, app("sum", a1, num(MINER_DRIFT))),
    ]


def test_no_timestamps_no_constraints():
    ts = index_timestamps(Execution())
    assert not ts and len(ts) == 0


def test_renamed_fact_keeps_arguments():
    f = Fact("Gvar", (Var("x"), num(1)))
    g = rename_fact(f, "B")
    assert g.name == "Gvar_B" and g.args == f.args
