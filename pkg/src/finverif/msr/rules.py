"""Labelled rewrite rules `l -[a]-> r` and their debug dump."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .facts import Fact, action_vars
from .terms import Fresh, Sort, Term, Var, term_vars

FR = "Fr"


@dataclass(eq=False)
class Rule:
    name: str
    premise: tuple
    actions: tuple = ()
    conclusion: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.premise = tuple(self.premise)
        self.actions = tuple(self.actions)
        self.conclusion = tuple(self.conclusion)
        for f in self.premise + self.conclusion:
            for a in f.args:
                if _has_fresh(a):
                    raise ValueError(f"rule {self.name} mentions a fresh name literally")

    @property
    def fresh_vars(self) -> list:
        """Variables bound by Fr premises (new values drawn by the Fresh rule)."""
        return [f.args[0] for f in self.premise if f.name == FR]

    @property
    def matched_premise(self) -> list:
        return [f for f in self.premise if f.name != FR]

    def vars(self) -> set:
        out = set()
        for f in self.premise + self.conclusion:
            out |= f.vars()
        for a in self.actions:
            out |= action_vars(a)
        return out

    def premise_vars(self) -> set:
        out = set()
        for f in self.premise:
            out |= f.vars()
        return out

    def unbound_vars(self) -> list:
        """Variables not bound by any premise; must be enumerated (Addr/FnName/Tag)."""
        bound = self.premise_vars()
        return sorted((v for v in self.vars() if v not in bound), key=lambda v: v.name)

    def signature(self) -> tuple:
        """Structural identity used for alpha-equivalence checks."""
        return (self.name, self.premise, self.actions, self.conclusion)

    def __repr__(self):
        return dump_rule(self)


def _has_fresh(t: Term) -> bool:
    return isinstance(t, Fresh)


def dump_rule(r: Rule) -> str:
    prem = ", ".join(repr(f) for f in r.premise)
    acts = ", ".join(str(a) for a in r.actions)
    concl = ", ".join(repr(f) for f in r.conclusion)
    return f"{r.name}: [{prem}] --[{acts}]-> [{concl}]"


def dump_rules(rules) -> str:
    return "\n\n".join(dump_rule(r) for r in rules) + "\n"


def alpha_normalize(r: Rule) -> str:
    """Dump with variables renamed to x1, x2, ... in order of first occurrence."""
    names: dict = {}
    text = dump_rule(r)

    def sub(m):
        n = m.group(1)
        if n not in names:
            names[n] = f"x{len(names) + 1}"
        return f"σv({names[n]})"
    return re.sub(r"σv\(([^()]*)\)", sub, text)


def var(name: str, sort: Sort = Sort.NUM) -> Var:
    return Var(name, sort)


def fr(v: Var) -> Fact:
    return Fact(FR, (v,))


__all__ = ["Rule", "dump_rule", "dump_rules", "alpha_normalize", "fr", "FR", "var",
           "term_vars"]
