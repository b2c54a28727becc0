"""Concrete re-execution of a counterexample trace under a witness assignment."""
from __future__ import annotations

from ..compmodel.invariant import C1
from ..compmodel.timestamps import index_timestamps
from ..msr.engine import NotApplicable, State, apply_rule
from ..msr.facts import AnyOf, Fact, Label, NumFact, PredEq, PredNeq, PropCheck, decide_pred
from ..msr.rules import FR
from ..msr.terms import (UINT_MOD, App, Const, Fresh, InitRead, MapVal, Sort, evaluate, num,
                         select)


class _Model(dict):
    def __missing__(self, key):
        return 0


class Concretizer:
    """Maps ground terms to concrete values; maps keep only entries that differ
    from their initial slot value, so equal maps have equal representations."""

    def __init__(self, witness: dict):
        self.model = _Model({k: v for k, v in witness.items()})

    def value(self, t) -> int:
        return evaluate(self.term(t), self.model)

    def term(self, t):
        if isinstance(t, Const):
            return t
        if isinstance(t, (Fresh, InitRead)) and t.sort == Sort.NUM:
            return num(self.model[t])
        if isinstance(t, App):
            return num(evaluate(App(t.op, tuple(self.term(a) for a in t.args)), self.model))
        if isinstance(t, MapVal):
            entries = []
            for keys, v in t.entries:
                cv = self.term(v)
                if cv.value != self.model[InitRead(t.base, keys)]:
                    entries.append((keys, cv))
            return MapVal(t.base, tuple(entries))
        if isinstance(t, Fresh) and t.sort == Sort.MAP:
            return MapVal(t)
        if isinstance(t, Fresh):
            return t
        raise TypeError(f"cannot concretize {t!r}")

    def fact(self, f: Fact) -> Fact:
        return Fact(f.name, tuple(self.term(a) for a in f.args), f.tag)

    def state(self, st: State) -> State:
        return State(self.fact(f) for f in st)


def _sum_at(conc, m, keys) -> int:
    if m is None:
        return 0
    return sum(conc.value(select(m, k)) for k in keys)


def replay(trace, witness: dict):
    """Re-run every rule of the trace on concrete values.

    Returns (ok, info) where info holds the property evaluation.
    """
    conc = Concretizer(witness)
    state = State()
    info = {"end": False, "init": None, "final": None, "compare": None}
    for step in trace.steps:
        if step.rule == "Fresh":
            continue
        rule = step.rule_ref
        sub = {v: conc.term(t) for v, t in step.subst.items()}
        fr = [Fact(FR, (sub[f.args[0]],)) for f in rule.premise if f.name == FR]
        try:
            st = state.replace((), fr)
            state = conc.state(apply_rule(st, rule, sub))
        except (NotApplicable, ZeroDivisionError):
            return False, info
        for a in rule.actions:
            try:
                a = a.subst(sub)
                if isinstance(a, NumFact):
                    c = a.constraint
                    ok = _rel(c.rel, conc.value(c.lhs), conc.value(c.rhs))
                elif isinstance(a, AnyOf):
                    ok = any(_rel(c.rel, conc.value(c.lhs), conc.value(c.rhs))
                             for c in a.options)
                    info["compare"] = ok
                elif isinstance(a, (PredEq, PredNeq)):
                    d = decide_pred(PredEq(conc.term(a.lhs), conc.term(a.rhs))
                                    if isinstance(a, PredEq) else
                                    PredNeq(conc.term(a.lhs), conc.term(a.rhs)))
                    ok = d is True
                elif isinstance(a, PropCheck):
                    ok = True
                    if a.kind == "inv_init":
                        info["init_check"] = a.args
                    elif a.kind == "inv_end":
                        info["end_check"] = a.args
                else:
                    ok = True
                    if isinstance(a, Label) and a.name == "End":
                        info["end"] = True
            except ZeroDivisionError:
                ok = False
            if not ok:
                return False, info
    if not info["end"]:
        return False, info
    end = info.get("end_check")
    if end is not None:
        m_end, keys, rhs_end = end
        init = info.get("init_check")
        m_init, rhs_init = init if init is not None else (None, C1)
        s0, s1 = _sum_at(conc, m_init, keys), _sum_at(conc, m_end, keys)
        info["init"], info["final"] = s0, s1
        if rhs_end == C1:
            violated = s0 != s1
        else:
            violated = s0 == conc.value(rhs_init) and s1 != conc.value(rhs_end)
            info["rhs"] = (conc.value(rhs_init), conc.value(rhs_end))
        if not violated:
            return False, info
    elif info["compare"] is not True:
        return False, info
    return True, info


def _rel(rel, a, b) -> bool:
    return {"eq": a == b, "neq": a != b, "lt": a < b, "le": a <= b}[rel]


def check_witness(trace, witness: dict, domain=None) -> bool:
    """True iff the trace re-executes concretely and ends in a property violation."""
    lo, hi = domain or (0, UINT_MOD - 1)
    for k, v in witness.items():
        if k != Fresh("C1") and not lo <= v <= hi:
            return False
    conc = Concretizer(witness)
    for c in index_timestamps(trace):
        if not _rel(c.rel, conc.value(c.lhs), conc.value(c.rhs)):
            return False
    ok, _ = replay(trace, witness)
    return ok
