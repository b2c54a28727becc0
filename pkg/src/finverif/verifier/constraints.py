"""Numeric constraints of a trace, including the property instantiation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..compmodel.invariant import C1
from ..compmodel.timestamps import TimestampConstraintSet, index_timestamps
from ..msr.facts import AnyOf, NumConstraint, NumFact, PredEq, PredNeq, PropCheck, decide_pred
from ..msr.terms import (UINT_MOD, Const, Fresh, InitRead, Sort, app, evaluate, fresh_leaves,
                         render, select)

C1_SYMBOL = Fresh("C1")
REL_TEXT = {"eq": "==", "neq": "!=", "lt": "<", "le": "<="}


def holds(c: NumConstraint, model: dict) -> bool:
    """Concrete truth of a constraint; False when a division by zero occurs."""
    try:
        a, b = evaluate(c.lhs, model), evaluate(c.rhs, model)
    except ZeroDivisionError:
        return False
    return {"eq": a == b, "neq": a != b, "lt": a < b, "le": a <= b}[c.rel]


def trivial(c: NumConstraint) -> Optional[bool]:
    """Decide a constraint without a solver when both sides are syntactically settled."""
    if isinstance(c.lhs, Const) and isinstance(c.rhs, Const):
        return holds(c, {})
    if c.lhs == c.rhs:
        return c.rel in ("eq", "le")
    return None


def constraint_text(c: NumConstraint) -> str:
    return f"{render(c.lhs)} {REL_TEXT[c.rel]} {render(c.rhs)}"


@dataclass
class ConstraintSet:
    path: list = field(default_factory=list)
    disjunctions: list = field(default_factory=list)   # tuples; at least one member holds
    violation: list = field(default_factory=list)  # property assumption and negation
    timestamps: TimestampConstraintSet = field(default_factory=TimestampConstraintSet)
    address_facts: list = field(default_factory=list)  # (rel, name, name) from aliasing choices
    domain: tuple = (0, UINT_MOD - 1)
    free_symbols: set = field(default_factory=set)  # symbols exempt from the range

    def conjuncts(self) -> list:
        return list(self.path) + list(self.violation) + list(self.timestamps)

    @property
    def symbols(self) -> list:
        out: set = set()
        for c in self.conjuncts():
            fresh_leaves(c.lhs, out)
            fresh_leaves(c.rhs, out)
        for d in self.disjunctions:
            for c in d:
                fresh_leaves(c.lhs, out)
                fresh_leaves(c.rhs, out)
        return sorted(out, key=lambda t: t.key)

    def satisfied_by(self, model: dict) -> bool:
        lo, hi = self.domain
        full = {s: model.get(s, 0) for s in self.symbols}
        if any(not lo <= v <= hi for s, v in full.items() if s not in self.free_symbols):
            return False
        if not all(holds(c, full) for c in self.conjuncts()):
            return False
        return all(any(holds(c, full) for c in d) for d in self.disjunctions)

    def lines(self) -> list:
        out = [f"{a} {'=' if rel == 'eq' else '!='} {b}" for rel, a, b in self.address_facts]
        out += [constraint_text(c) for c in self.conjuncts()]
        out += [" or ".join(constraint_text(c) for c in d) for d in self.disjunctions]
        lo, hi = self.domain
        hi_text = "2^256 - 1" if hi == UINT_MOD - 1 else str(hi)
        out.append(f"{lo} <= x <= {hi_text} for every symbol")
        return out

    def dump(self) -> str:
        return "\n".join(self.lines())


def _sum(terms) -> object:
    return app("sum", *terms) if terms else Const(0, Sort.NUM)


def property_constraints(init: PropCheck | None, end: PropCheck | None) -> list:
    """Sum over the index terms at start equals the right-hand side; at the end it differs."""
    if end is None:
        return []
    m_end, keys, rhs_end = end.args
    m_init, rhs_init = init.args if init is not None else (None, C1)
    init_vals = [select(m_init, k) for k in keys] if m_init is not None else []
    end_vals = [select(m_end, k) for k in keys] if m_end is not None else []
    if len(init_vals) != len(keys):
        init_vals = [InitRead(Fresh("unknown_map", Sort.MAP), k) for k in keys]
    s0, s1 = _sum(init_vals), _sum(end_vals)
    if rhs_end == C1:
        return [NumConstraint("eq", s0, C1_SYMBOL), NumConstraint("neq", s1, C1_SYMBOL)]
    return [NumConstraint("eq", s0, rhs_init), NumConstraint("neq", s1, rhs_end)]


def address_choices(trace) -> list:
    """(name, atom) for every address argument picked by a generator rule.

    Names of later transactions carry a `#k` suffix.
    """
    chosen = []
    tx = 0
    for step in trace.steps:
        r = step.rule_ref
        if r is None or not r.meta.get("generator"):
            continue
        for v in sorted(r.unbound_vars(), key=lambda v: v.name):
            if v.sort == Sort.ADDR:
                chosen.append((f"{v.name}#{tx}" if tx else v.name, step.subst[v]))
        tx += 1
    return chosen


def _address_facts(trace) -> list:
    """Equalities/disequalities among the address arguments chosen by generator rules."""
    chosen = address_choices(trace)
    out = []
    for i, (n1, a1) in enumerate(chosen):
        for n2, a2 in chosen[i + 1:]:
            out.append(("eq" if a1 == a2 else "neq", n1, n2))
    return out


def collect_constraints(trace, domain: tuple | None = None) -> ConstraintSet:
    cs = ConstraintSet(domain=domain or (0, UINT_MOD - 1))
    init = end = None
    for step in trace.steps:
        for a in step.actions:
            if isinstance(a, NumFact):
                cs.path.append(a.constraint)
            elif isinstance(a, AnyOf):
                decided = [trivial(c) for c in a.options]
                if True in decided:
                    continue
                live = tuple(c for c, d in zip(a.options, decided) if d is None)
                cs.disjunctions.append(live or tuple(a.options))
            elif isinstance(a, (PredEq, PredNeq)) and decide_pred(a) is None:
                cs.path.append(NumConstraint("eq" if isinstance(a, PredEq) else "neq",
                                             a.lhs, a.rhs))
            elif isinstance(a, PropCheck):
                if a.kind == "inv_init":
                    init = a
                elif a.kind == "inv_end":
                    end = a
    cs.violation = property_constraints(init, end)
    if cs.violation and cs.violation[0].rhs == C1_SYMBOL:
        cs.free_symbols.add(C1_SYMBOL)
    cs.timestamps = index_timestamps(trace)
    cs.address_facts = _address_facts(trace)
    return cs
