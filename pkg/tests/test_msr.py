from __future__ import annotations

import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_path, data_path, load, model_for
from finverif.msr import (EMPTY, EN, EY, RG, RL, RO, TC, TV, Const, Execution, Fact, Fresh,
                          Label, NotApplicable, OnceLabel, PairedLabels, Rule, Sort,
                          SortMismatch, State, TupleSeq, Var, VarTuple, addr, apply_rule,
                          check_restrictions, dump_rule, enumerate_applicable, fire, fn_name,
                          num)
from finverif.verifier import SearchConfig, Searcher


def _kind(model, kind, fn=None):
    return next(r for r in model.rules if r.meta.get("kind") == kind
                and (fn is None or r.meta.get("fn") == fn))


def _var(rule, name):
    return next(v for v in rule.vars() if v.name == name)


# ---------------------------------------------------------------- apply_rule

def test_ext_call_adds_call_fact():
    _, _, indep, _ = load(corpus_path("ex1.sol"))
    rule = _kind(indep, "ext_call")
    gvar = Fact("Gvar", (addr("Ex1"), num(100)))
    sender = addr("0x12")
    subst = {_var(rule, "c_b"): sender, _var(rule, "to"): sender,
             _var(rule, "value"): Fresh("value")}
    steps = fire(State([gvar]), rule, subst)
    assert [s.rule for s in steps] == ["Fresh", "ext_call"]
    final = steps[-1].state
    call = Fact("Call_e", (addr("Ex1"), fn_name("transfer"), sender, sender, Fresh("value")))
    assert final.contains([gvar, call])
    assert len(final) == 2


def test_absent_premise_is_not_applicable():
    _, _, indep, _ = load(data_path("ex2.sol"))
    rule = _kind(indep, "var_assign")
    subst = {v: (num(1) if v.sort == Sort.NUM else Const("x", v.sort)) for v in rule.vars()}
    with pytest.raises(NotApplicable):
        apply_rule(EMPTY, rule, subst)


def test_var_assign_adds_the_parameter():
    _, _, indep, _ = load(data_path("ex2.sol"))
    rule = _kind(indep, "var_assign")
    subst = {v: num(100) for v in rule.vars() if v.sort == Sort.NUM}
    subst.update({v: Const("EXT", Sort.TAG) for v in rule.vars() if v.sort == Sort.TAG})
    subst.update({v: addr("0x12") for v in rule.vars() if v.sort == Sort.ADDR})
    subst.update({v: Fresh("ether", Sort.MAP) for v in rule.vars() if v.sort == Sort.MAP})
    prem = [f.subst(subst) for f in rule.premise]
    after = apply_rule(State(prem), rule, subst)
    (out,) = list(after)
    assert out.name == "Var_11"
    # v1 occupies the slot right after the contract address
    assert out.args[5] == num(200)


def test_sort_mismatch():
    _, _, indep, _ = load(data_path("ex2.sol"))
    rule = _kind(indep, "var_assign")
    subst = {v: addr("0x12") for v in rule.vars()}
    with pytest.raises(SortMismatch):
        apply_rule(EMPTY, rule, subst)


# ---------------------------------------------------------------- enumerate_applicable

def test_enumerate_init_on_empty_state():
    _, _, indep, _ = load(corpus_path("ex1.sol"))
    init = _kind(indep, "init_evars")
    got = enumerate_applicable(EMPTY, [init])
    assert len(got) == 1
    rule, subst = got[0]
    assert rule is init
    assert all(isinstance(getattr(t, "base", t), Fresh) for t in subst.values())


def _after_init(indep):
    st_ = EMPTY
    for kind in ("init_evars", "init_gvars"):
        for r in indep.rules:
            if r.meta.get("kind") == kind:
                (rule, subst), = enumerate_applicable(st_, [r])
                st_ = apply_rule(st_.replace((), [f.subst(subst) for f in r.premise]), r, subst)
    return st_


def test_enumerate_after_init_offers_every_entry_function():
    _, _, indep, _ = load(corpus_path("ex1.sol"))
    st_ = _after_init(indep)
    assert sorted(f.name for f in st_) == ["Evar", "Gvar"]
    got = enumerate_applicable(st_, indep.rules, universe={Sort.ADDR: indep.address_universe})
    gens = {(r.meta["contract"], r.meta["fn"]) for r, _ in got if r.meta.get("kind") == "ext_call"}
    assert gens == set(indep.entry_functions)
    # two addresses for c_b and two for `to`
    assert sum(r.meta.get("kind") == "ext_call" for r, _ in got) == 4


def test_enumerate_without_calls_or_frames_is_empty():
    _, _, indep, _ = load(corpus_path("ex1.sol"))
    st_ = _after_init(indep)
    body = [r for r in indep.rules if not r.meta.get("generator")
            and not r.meta.get("kind", "").startswith("init_")]
    assert enumerate_applicable(st_, body, universe={Sort.ADDR: indep.address_universe}) == []


ATOMS = [addr("a"), addr("b")]
VARS = [Var("x", Sort.ADDR), Var("y", Sort.ADDR)]
_term = st.sampled_from(ATOMS + VARS)
_ground = st.sampled_from(ATOMS)


def _facts(term, max_size):
    return st.lists(st.builds(lambda n, args: Fact(n, args), st.sampled_from(["P", "Q"]),
                              st.lists(term, min_size=1, max_size=2).map(tuple)),
                    max_size=max_size)


_rules = st.lists(st.tuples(_facts(_term, 2), _facts(_term, 2)), min_size=1, max_size=3)


@settings(max_examples=300, deadline=None)
@given(spec=_rules, state=_facts(_ground, 4))
def test_enumeration_matches_brute_force(spec, state):
    rules = [Rule(f"r{i}", prem, (), concl) for i, (prem, concl) in enumerate(spec)]
    st_ = State(state)
    got = Counter((r.name, frozenset(s.items()))
                  for r, s in enumerate_applicable(st_, rules, universe={Sort.ADDR: ATOMS}))
    want = Counter()
    for r in rules:
        vs = sorted(r.vars(), key=lambda v: v.name)
        for vals in itertools.product(ATOMS, repeat=len(vs)):
            subst = dict(zip(vs, vals))
            if st_.contains([f.subst(subst) for f in r.premise]):
                want[(r.name, frozenset(subst.items()))] += 1
    assert set(got) == set(want)
    assert all(n == 1 for n in got.values())


# ---------------------------------------------------------------- engine invariants

@settings(max_examples=300, deadline=None)
@given(spec=_rules, state=_facts(_ground, 4), data=st.data())
def test_cardinality_and_frame(spec, state, data):
    rules = [Rule(f"r{i}", prem, (), concl) for i, (prem, concl) in enumerate(spec)]
    st_ = State(state)
    for rule in rules:
        vs = sorted(rule.vars(), key=lambda v: v.name)
        subst = {v: data.draw(_ground) for v in vs}
        prem = [f.subst(subst) for f in rule.premise]
        concl = [f.subst(subst) for f in rule.conclusion]
        try:
            after = apply_rule(st_, rule, subst)
        except NotApplicable:
            assert not st_.contains(prem)
            continue
        assert len(after) == len(st_) - len(rule.premise) + len(rule.conclusion)
        untouched = st_.counts - Counter(prem)
        assert after.counts == untouched + Counter(concl)
        # pure: same inputs, same output
        assert apply_rule(st_, rule, subst) == after


def _executions(model, limit=30):
    cfg = SearchConfig(max_depth=60, timeout=30)
    for ex, _sig in itertools.islice(Searcher(model, cfg).traces(), limit):
        yield ex


@pytest.mark.parametrize("name, kind", [("ex1.sol", "invariant"), ("ex3_dice.sol", "equivalence"),
                                        ("reentrancy.sol", "equivalence")])
def test_fresh_names_are_unique(name, kind):
    n = 0
    for ex in _executions(model_for(corpus_path(name), kind)):
        names = ex.fresh_names()
        assert len(names) == len(set(names))
        n += 1
    assert n > 0


# ---------------------------------------------------------------- restrictions

def _trace(*labels):
    return Execution(steps=[_step(acts) for acts in labels])


def _step(acts):
    from finverif.msr import Step
    return Step("r", {}, EMPTY, tuple(acts))


def test_double_start_is_rejected():
    once = [OnceLabel("Start", per_args=False)]
    assert check_restrictions(_trace([Label("Start")]), once)
    assert not check_restrictions(_trace([Label("Start")], [], [Label("Start")]), once)


def test_empty_trace_satisfies_everything():
    rs = [OnceLabel("Start", per_args=False), PairedLabels("Exc_A", "Exc_B"), OnceLabel("Init_E")]
    assert check_restrictions(Execution(), rs)


def test_unpaired_exc_label():
    pair = [PairedLabels("Exc_A", "Exc_B")]
    a = Label("Exc_A", (addr("c"), fn_name("f")))
    b = Label("Exc_B", (addr("c"), fn_name("f")))
    assert not check_restrictions(_trace([a]), pair)
    assert check_restrictions(_trace([a], [b]), pair)
    assert not check_restrictions(_trace([a], [Label("Exc_B", (addr("d"), fn_name("f")))]), pair)


def test_init_labels_once_per_contract():
    once = [OnceLabel("Init_G")]
    assert check_restrictions(_trace([Label("Init_G", (addr("A"),))],
                                     [Label("Init_G", (addr("B"),))]), once)
    assert not check_restrictions(_trace([Label("Init_G", (addr("A"),))],
                                         [Label("Init_G", (addr("A"),))]), once)


# ---------------------------------------------------------------- tuples and dumps

def test_tuple_projections_keep_order():
    c, bal, x, eth = addr("C"), Var("bal", Sort.MAP), Var("x"), Var("ether", Sort.MAP)
    w = TupleSeq((VarTuple(c, TC, RO, EN), VarTuple(bal, TV, RG, EN), VarTuple(x, TV, RL, EN),
                  VarTuple(eth, TV, RG, EY)))
    assert w.sigma() == [c, bal, x, eth]
    assert w.g() == [bal, eth]
    assert w.e() == [eth]
    assert w.g_minus_e() == [bal]
    assert w.l() == [x]
    assert w[1] == c


def test_vartuple_invariants():
    with pytest.raises(ValueError):
        VarTuple(Var("x"), TC, RO, EN)
    with pytest.raises(ValueError):
        VarTuple(Var("x"), TV, RL, EY)


def test_fresh_names_never_appear_in_rules():
    with pytest.raises(ValueError):
        Rule("bad", [], [], [Fact("P", (Fresh("n"),))])


def test_dump_format():
    r = Rule("demo", [Fact("Gvar", (addr("C"), Var("v")))], [Label("End")],
             [Fact("Gvar", (addr("C"), num(3)))])
    assert dump_rule(r) == "demo: [Gvar(σa(C), σv(v))] --[End()]-> [Gvar(σa(C), σa(3))]"
