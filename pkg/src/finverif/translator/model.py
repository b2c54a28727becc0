"""Independent model: initialization, translated functions and adversary rules."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..frontend import ast as A
from ..frontend.unroll import has_loops, unroll_loops
from ..msr.facts import Fact, Label, PredEq
from ..msr.restrictions import OnceLabel, PredicatesHold
from ..msr.rules import Rule, dump_rule, fr
from ..msr.terms import Const, Sort, Var, addr, app, fn_name, num
from ..msr.tuples import TupleSeq
from .normalize import normalize_function
from .translate import (C_ADV, PHASE_GEN, PHASE_INIT_E, PHASE_INIT_G, PHASE_RUN,
                        ContractInfo, FunctionTranslator, contract_info, sort_of)

DEFAULT_UNROLL = 8


@dataclass
class IndependentModel:
    rules: list
    restrictions: list
    omega0: TupleSeq
    address_universe: list
    entry_functions: list
    contracts: dict = field(default_factory=dict)
    main: str = ""
    uses_timestamp: bool = False

    def rule(self, uid: str) -> Rule:
        for r in self.rules:
            if r.meta.get("uid") == uid:
                return r
        raise KeyError(uid)

    def function_rules(self, contract: str, fn: str) -> list:
        return [r for r in self.rules
                if r.meta.get("contract") == contract and r.meta.get("fn") == fn]


def prepare_contract(ast: A.ContractAst, unroll_bound: int = DEFAULT_UNROLL) -> A.ContractAst:
    if has_loops(ast):
        ast = unroll_loops(ast, unroll_bound)
    return replace(ast, functions=tuple(normalize_function(f) for f in ast.functions))


def address_literals(asts) -> list:
    out = set()
    for c in asts:
        for fn in c.functions:
            for s in A.walk_stmts(fn.body):
                for e in A.stmt_exprs(s):
                    for x in A.walk_expr(e):
                        if isinstance(x, A.AddressLit):
                            out.add(addr(x.value))
    return sorted(out)


def init_rules(infos) -> list:
    eth = list(infos)[0].ether_term() if infos else Var("ether", Sort.MAP)
    rules = [Rule("init_evars", [fr(eth)], [Label("Init_E")], [Fact("Evar", (eth,))],
                  {"kind": "init_evars", "phase": PHASE_INIT_E, "uid": "init_evars"})]
    for info in infos:
        g = info.gvar_terms()
        rules.append(Rule("init_gvars", [fr(v) for v in g if v.sort != Sort.ADDR],
                          [Label("Init_G", (info.atom,))], [Fact("Gvar", (info.atom, *g))],
                          {"kind": "init_gvars", "phase": PHASE_INIT_G,
                           "uid": f"init_gvars.{info.name}", "contract": info.name}))
    return rules


def build_adversary_rules(model: IndependentModel) -> list:
    """fb_in_call (one per externally callable function) and ret_fb, if any fallback exists."""
    if not any(r.meta.get("kind") == "fb_call" for r in model.rules):
        return []
    cc, ff, d = Var("c", Sort.ADDR), Var("f", Sort.FN), Var("depth")
    rules = []
    for cname, fname in model.entry_functions:
        fn = model.contracts[cname].ast.function(fname)
        params = [Var(p, sort_of(t)) for p, t in fn.params]
        target, tf = addr(cname), fn_name(fname)
        call = Fact("Call_in", (target, tf, C_ADV, app("add", d, num(1)), *params))
        wait = Fact("FbWait", (cc, ff, d, target, tf))
        rules.append(Rule("fb_in_call",
                          [Fact("Fallback", (cc, ff, d))] +
                          [fr(p) for p in params if p.sort == Sort.NUM],
                          [], [call, wait],
                          {"kind": "fb_in_call", "phase": PHASE_RUN,
                           "uid": f"fb_in_call.{cname}.{fname}", "contract": cname,
                           "fn": fname, "addr_domains": {}}))
    c2, f2, d1 = Var("c_x", Sort.ADDR), Var("f_x", Sort.FN), Var("r_depth")
    rules.append(Rule("ret_fb",
                      [Fact("Return", (c2, f2, C_ADV, d1)), Fact("FbWait", (cc, ff, d, c2, f2))],
                      [PredEq(d1, app("add", d, num(1)))],
                      [Fact("ReturnFallback", (cc, ff, d))],
                      {"kind": "ret_fb", "phase": PHASE_RUN, "uid": "ret_fb"}))
    return rules


def build_independent_model(contracts, main: str | None = None,
                            unroll_bound: int = DEFAULT_UNROLL) -> IndependentModel:
    """Translate every contract of a source unit into one rule system."""
    if isinstance(contracts, A.ContractAst):
        contracts = [contracts]
    asts = [prepare_contract(c, unroll_bound) for c in contracts]
    names = {c.name for c in asts}
    infos = {c.name: contract_info(c, names) for c in asts}
    # all contracts share one ether map term
    eth = next(iter(infos.values())).ether_term()
    for info in infos.values():
        if info.ether_term() != eth:
            raise ValueError("ether slot naming diverged between contracts")

    def callee_params(cname, fname):
        info = infos.get(cname)
        if info is None:
            return None
        try:
            fn = info.ast.function(fname)
        except KeyError:
            return None
        return [sort_of(t) for _, t in fn.params]

    rules = init_rules(list(infos.values()))
    entry = []
    uses_ts = False
    for c in asts:
        for fn in c.entry_functions:
            tr = FunctionTranslator(infos[c.name], fn, callee_params)
            rules.extend(tr.translate())
            entry.append((c.name, fn.name))
            uses_ts = uses_ts or tr.bt is not None
    universe = sorted({info.atom for info in infos.values()} | {C_ADV} |
                      set(address_literals(asts)))
    main = main or asts[-1].name
    model = IndependentModel(rules, [OnceLabel("Init_E"), OnceLabel("Init_G"),
                                     PredicatesHold()],
                             infos[main].omega0, universe, entry, infos, main, uses_ts)
    model.rules.extend(build_adversary_rules(model))
    return model


def dump_model(rules) -> str:
    blocks = []
    for r in rules:
        m = r.meta
        where = m.get("uid", r.name)
        if "line" in m:
            where += f" (line {m['line']})"
        blocks.append(f"// {where}\n{dump_rule(r)}")
    return "\n\n".join(blocks) + "\n"


__all__ = ["IndependentModel", "build_independent_model", "build_adversary_rules",
           "dump_model", "prepare_contract", "C_ADV", "PHASE_GEN", "PHASE_RUN", "Const"]
