"""Invariant model: one transaction, invariant assumed at start, negated at end."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..msr.facts import Label, PropCheck
from ..msr.restrictions import OnceLabel
from ..msr.rules import Rule
from ..msr.terms import Sort, num, tag
from ..propertygen.properties import Invariant
from ..translator.model import IndependentModel
from ..translator.theta import Env, InternalError, UnsupportedExpr, theta_o

C1 = tag("C1")


@dataclass
class InvariantModel:
    rules: list
    restrictions: list
    property: Invariant
    indep: IndependentModel = field(repr=False, default=None)
    barriers: dict = field(default_factory=dict)

    kind = "invariant"


def _slot(info, name):
    k = info.omega0.position(name)
    if k is None:
        raise ValueError(f"{info.name} has no global '{name}'")
    return info.omega0.items[k].name


def _rhs(prop: Invariant, info):
    if prop.total_supply:
        return _slot(info, prop.total_supply)
    if prop.constant is not None:
        return num(prop.constant)
    return C1


def end_index_keys(prop: Invariant, rule: Rule):
    """Index key tuples of the property, as terms at a returning statement.

    None when the property cannot be evaluated there (a custom invariant
    naming something out of scope).
    """
    env: Env = rule.meta.get("env")
    if env is None:
        return None
    out = []
    for t in prop.terms_of(rule.meta["contract"], rule.meta["fn"]):
        try:
            keys = tuple(theta_o(k, env, []) for k in t.keys)
        except (UnsupportedExpr, InternalError):
            if prop.custom:
                return None
            continue  # a local of another path
        if any(k.sort != Sort.ADDR for k in keys):
            return None
        out.append(keys)
    return tuple(out)


# the check of a transaction that cannot break the property: 0 != 0
VACUOUS_END = PropCheck("inv_end", (None, (), C1))


def build_invariant_model(indep: IndependentModel, prop: Invariant) -> InvariantModel:
    info = indep.contracts[prop.contract]
    m = _slot(info, prop.var)
    rules = []
    for r in indep.rules:
        kind = r.meta.get("kind")
        if kind == "ext_call":
            r = Rule("ext_call_inv", r.premise, r.actions + (Label("Start"),), r.conclusion,
                     {**r.meta, "kind": "ext_call_inv"})
        elif kind == "init_gvars" and r.meta.get("contract") == prop.contract:
            r = Rule("init_gvars_inv", r.premise,
                     r.actions + (PropCheck("inv_init", (m, _rhs(prop, info))),),
                     r.conclusion, {**r.meta, "kind": "init_gvars_inv"})
        elif kind == "ret_ext":
            keys = None
            if r.meta.get("contract") == prop.contract:
                keys = end_index_keys(prop, r)
            check = VACUOUS_END if keys is None else \
                PropCheck("inv_end", (m, keys, _rhs(prop, info)))
            r = Rule("ret_ext_inv", r.premise, r.actions + (check, Label("End")), r.conclusion,
                     {**r.meta, "kind": "ret_ext_inv"})
        rules.append(r)
    restrictions = list(indep.restrictions) + [OnceLabel("Start", per_args=False)]
    return InvariantModel(rules, restrictions, prop, indep)
