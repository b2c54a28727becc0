"""Equivalence model: the same transactions run twice (copies A and B), compared at the end."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..msr.facts import AnyOf, Fact, Label, NumConstraint
from ..msr.restrictions import OnceLabel, PairedLabels, PredicatesHold
from ..msr.rules import FR, Rule, fr
from ..msr.terms import Sort, Var, select
from ..propertygen.properties import Equivalence
from ..translator.model import IndependentModel
from ..translator.translate import C_ADV, PHASE_GEN, PHASE_INIT_E, PHASE_INIT_G
from .naming import rename_fact, side_name

PHASE_A, PHASE_B, PHASE_COMPARE = 3, 4, 5
SIDES = ("A", "B")


@dataclass
class EquivalenceModel:
    rules: list
    restrictions: list
    property: Equivalence
    uses_timestamp: bool = False
    indep: IndependentModel = field(repr=False, default=None)
    # entering a phase requires that no fact of the listed side is in flight
    barriers: dict = field(default_factory=lambda: {PHASE_B: "A", PHASE_COMPARE: "B"})

    kind = "equivalence"

    def side_rules(self, side: str) -> list:
        return [r for r in self.rules if r.meta.get("side") == side]


def _rename_rule(r: Rule, side: str, phase: int) -> Rule:
    prem = [rename_fact(f, side) for f in r.premise]
    concl = [rename_fact(f, side) for f in r.conclusion]
    kind = r.meta.get("kind", r.name)
    meta = {**r.meta, "kind": kind, "side": side, "phase": phase,
            "uid": f"{r.meta.get('uid', r.name)}/{side}"}
    return Rule(f"{kind}_{side}", prem, r.actions, concl, meta)


def _recv_ext(r: Rule, side: str) -> Rule:
    """recv_ext_A/B: labelled with Exc_side; the timestamp comes from Bvar_side."""
    base = _rename_rule(r, side, PHASE_A if side == "A" else PHASE_B)
    call = base.premise[0]
    bt = r.meta.get("bt")
    prem = []
    for f in base.premise:
        if f.name == FR and bt is not None and f.args[0] == bt:
            prem.append(Fact(f"Bvar_{side}", (bt,)))
        else:
            prem.append(f)
    acts = base.actions + (Label(f"Exc_{side}", call.args),)
    return Rule(base.name, prem, acts, base.conclusion, base.meta)


def _generator(r: Rule) -> Rule:
    """ext_call_AB: one transaction handed to both copies with identical arguments."""
    call = r.conclusion[0]
    concl = [Fact("Call_Ae", call.args), Fact("Call_Be", call.args)]
    prem = list(r.premise)
    name = "ext_call_AB"
    if r.meta.get("bt") is not None:
        bts = [Var(f"bt_{s}") for s in SIDES]
        prem += [fr(b) for b in bts]
        concl = [Fact(f"Bvar_{s}", (b,)) for s, b in zip(SIDES, bts)] + concl
        name = "ext_call_bvar_AB"
    return Rule(name, prem, r.actions, concl,
                {**r.meta, "kind": name, "uid": r.meta["uid"] + "/AB"})


def _init(r: Rule) -> Rule:
    f = r.conclusion[0]
    concl = [rename_fact(f, s) for s in SIDES]
    kind = r.meta["kind"] + "_AB"
    return Rule(kind, r.premise, r.actions, concl, {**r.meta, "kind": kind,
                                                     "uid": r.meta["uid"] + "/AB"})


def _copy_term(t, side):
    return Var(f"{t.name}_{side}", t.sort)


def compare_rule(indep: IndependentModel, prop: Equivalence) -> Rule:
    prem, maps = [], {}
    for side in SIDES:
        for cname, info in indep.contracts.items():
            g = [_copy_term(t, side) for t in info.gvar_terms()]
            prem.append(Fact(side_name("Gvar", side), (info.atom, *g)))
            for orig, copy in zip(info.gvar_terms(), g):
                maps[(side, cname, orig.name)] = copy
        eth = _copy_term(next(iter(indep.contracts.values())).ether_term(), side)
        prem.append(Fact(side_name("Evar", side), (eth,)))
        maps[(side, "ether")] = eth
    options = []
    for cname, var in prop.token_vars:
        info = indep.contracts[cname]
        slot = info.omega0.items[info.omega0.position(var)].name
        a, b = (maps[(s, cname, slot.name)] for s in SIDES)
        options.append(NumConstraint("neq", select(a, (C_ADV,)), select(b, (C_ADV,))))
    if prop.ether:
        a, b = maps[("A", "ether")], maps[("B", "ether")]
        options.append(NumConstraint("neq", select(a, (C_ADV,)), select(b, (C_ADV,))))
    return Rule("compare_AB", prem, [AnyOf(tuple(options)), Label("End")], prem,
                {"kind": "compare_AB", "phase": PHASE_COMPARE, "uid": "compare_AB"})


def build_equivalence_model(indep: IndependentModel, prop: Equivalence) -> EquivalenceModel:
    rules = []
    for r in indep.rules:
        kind = r.meta.get("kind")
        if kind in ("init_evars", "init_gvars"):
            rules.append(_init(r))
        elif kind == "ext_call":
            rules.append(_generator(r))
        elif kind == "recv_ext":
            rules.extend(_recv_ext(r, s) for s in SIDES)
        else:
            rules.extend(_rename_rule(r, s, PHASE_A if s == "A" else PHASE_B) for s in SIDES)
    if not (prop.token_vars or prop.ether):
        raise ValueError("equivalence property watches nothing")
    rules.append(compare_rule(indep, prop))
    restrictions = [OnceLabel("Init_E"), OnceLabel("Init_G"), PairedLabels("Exc_A", "Exc_B"),
                    PredicatesHold()]
    return EquivalenceModel(rules, restrictions, prop, indep.uses_timestamp, indep)


__all__ = ["EquivalenceModel", "build_equivalence_model", "compare_rule", "PHASE_A",
           "PHASE_B", "PHASE_COMPARE", "PHASE_GEN", "PHASE_INIT_E", "PHASE_INIT_G", "Sort"]
