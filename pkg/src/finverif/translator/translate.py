"""Translation of contracts into rewrite rules.

Every function yields `ext_call`, `recv_ext`, `recv_in` and one rule group
per statement, addressed by a position string over {1,2,3}.  The fact
`Var_<pos>` carries the function's whole environment ω:

    [f, c_b, calltype, depth] · [c] · globals · [ether] · params [· bt] · locals
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend import ast as A
from ..msr.facts import Fact, NumConstraint, NumFact, PredEq
from ..msr.rules import Rule, fr
from ..msr.terms import (EXT, IN, Const, Sort, Term, Var, addr, app, fn_name, num, select,
                         store)
from ..msr.tuples import EN, EY, RG, RL, RO, TC, TV, TupleSeq, VarTuple
from .theta import Env, InternalError, UnsupportedExpr, reads_timestamp, theta, theta_o

C_ADV = addr("c_adv")
ETHER = "ether"

PHASE_INIT_E, PHASE_INIT_G, PHASE_GEN, PHASE_RUN = 0, 1, 2, 3


def sort_of(ty) -> Sort:
    if isinstance(ty, (A.UInt, A.Bool)):
        return Sort.NUM
    if isinstance(ty, A.Address):
        return Sort.ADDR
    if isinstance(ty, A.Mapping):
        return Sort.MAP
    raise UnsupportedExpr(f"values of type {type(ty).__name__} are not supported")


def check_mapping(ty, loc=None):
    t = ty
    while isinstance(t, A.Mapping):
        if not isinstance(t.key, A.Address):
            raise UnsupportedExpr("mapping keys must be addresses", loc)
        t = t.val
    if not isinstance(t, (A.UInt, A.Bool)):
        raise UnsupportedExpr("mapping values must be unsigned integers or booleans", loc)


class NameAlloc:
    def __init__(self, taken=()):
        self.taken = set(taken)

    def __call__(self, base: str) -> str:
        name, k = base, 0
        while name in self.taken:
            k += 1
            name = f"{base}_{k}"
        self.taken.add(name)
        return name


@dataclass
class ContractInfo:
    ast: A.ContractAst
    atom: Const
    omega0: TupleSeq
    constants: dict = field(default_factory=dict)
    refs: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.ast.name

    def gvar_terms(self) -> list:
        return self.omega0.g_minus_e()

    def ether_term(self) -> Term:
        return self.omega0.e()[0]


def build_omega0(ast: A.ContractAst) -> TupleSeq:
    """[⟨σa(c),Tc,Ro,En⟩] · non-ether globals (Rg, En) · ether balances (Rg, Ey)."""
    items = [VarTuple(addr(ast.name), TC, RO, EN)]
    alloc = NameAlloc({ETHER})
    for g in ast.state_globals:
        if isinstance(g.ty, A.Mapping):
            check_mapping(g.ty, g.loc)
        items.append(VarTuple(Var(alloc(g.name), sort_of(g.ty)), TV, RG, EN, g.name))
    items.append(VarTuple(Var(ETHER, Sort.MAP), TV, RG, EY))
    return TupleSeq(tuple(items))


def contract_info(ast: A.ContractAst, contract_names) -> ContractInfo:
    omega0 = build_omega0(ast)
    constants, refs = {}, {}
    from ..frontend.unroll import const_eval
    for g in ast.globals:
        if g.constant:
            v = const_eval(g.init, {}) if g.init is not None else 0
            if v is None:
                raise UnsupportedExpr(f"constant '{g.name}' is not a literal", g.loc)
            constants[g.name] = num(v) if not isinstance(g.ty, A.Address) else addr(hex(v))
        elif isinstance(g.ty, A.ContractRef):
            refs[g.name] = addr(g.ty.name)
    return ContractInfo(ast, addr(ast.name), omega0, constants, refs)


def _where(info, fn, pos, s=None):
    line = s.loc.line if s is not None else fn.loc.line
    return {"contract": info.name, "fn": fn.name, "pos": pos, "line": line}


def var_fact(pos: str, terms) -> Fact:
    return Fact("Var_" + pos, tuple(terms))


class FunctionTranslator:
    def __init__(self, info: ContractInfo, fn: A.FunctionDef, callee_params=None):
        self.info = info
        self.fn = fn
        self.callee_params = callee_params or (lambda c, f: None)
        self.fconst = fn_name(fn.name)
        omega0 = info.omega0
        self.alloc = NameAlloc(t.name.name for t in omega0 if isinstance(t.name, Var))
        self.c_b = Var(self.alloc("c_b"), Sort.ADDR)
        self.calltype = Var(self.alloc("calltype"), Sort.TAG)
        self.depth = Var(self.alloc("depth"), Sort.NUM)
        header = TupleSeq((VarTuple(self.fconst, TC, RO, EN), VarTuple(self.c_b),
                           VarTuple(self.calltype), VarTuple(self.depth)))
        params = []
        for pname, pty in fn.params:
            if isinstance(pty, A.Mapping):
                raise UnsupportedExpr("mapping parameters are not supported", fn.loc)
            params.append(VarTuple(Var(self.alloc(pname), sort_of(pty)), TV, RL, EN, pname))
        self.params = [t.name for t in params]
        self.bt = None
        if reads_timestamp(fn.body):
            self.bt = Var(self.alloc("bt"), Sort.NUM)
            params.append(VarTuple(self.bt))
        self.omega = header + omega0 + TupleSeq(tuple(params))
        self.eth = info.ether_term()
        self.rules: list = []

    # -------------------------------------------------------------- helpers

    def env(self, omega, refs=None) -> Env:
        return Env(self.info.atom, omega, self.c_b, self.eth, self.bt,
                   self.info.constants, refs if refs is not None else self.info.refs)

    def rule(self, kind, premise, actions, conclusion, pos, stmt=None, **meta):
        m = {"kind": kind, "phase": PHASE_RUN, **_where(self.info, self.fn, pos, stmt), **meta}
        m["uid"] = f"{self.info.name}.{self.fn.name}.{kind}@{pos}"
        self.rules.append(Rule(kind, premise, actions, conclusion, m))

    def gvar(self) -> Fact:
        return Fact("Gvar", (self.info.atom, *self.info.gvar_terms()))

    def evar(self, eth=None) -> Fact:
        return Fact("Evar", (eth if eth is not None else self.eth,))

    # -------------------------------------------------------------- entry rules

    def entry_rules(self):
        info, fn = self.info, self.fn
        num_params = [p for p in self.params if p.sort == Sort.NUM]
        call_args = (info.atom, self.fconst, self.c_b, *self.params)
        domains = {self.c_b.name: "sender"}
        self.rule("ext_call", [fr(p) for p in num_params], [], [Fact("Call_e", call_args)],
                  "0", generator=True, phase=PHASE_GEN, addr_domains=domains, bt=self.bt)
        sig = self.omega.sigma()
        bt_prem = [fr(self.bt)] if self.bt is not None else []
        ext_sig = [sig[0], self.c_b, EXT, num(0)] + sig[4:]
        self.rule("recv_ext", [Fact("Call_e", call_args), self.evar(), self.gvar()] + bt_prem,
                  [], [var_fact("1", ext_sig)], "0", bt=self.bt, starts_tx=True)
        in_args = (info.atom, self.fconst, self.c_b, self.depth, *self.params)
        in_sig = [sig[0], self.c_b, IN, self.depth] + sig[4:]
        self.rule("recv_in", [Fact("Call_in", in_args), self.evar(), self.gvar()] + bt_prem,
                  [], [var_fact("1", in_sig)], "0", bt=self.bt)

    def translate(self) -> list:
        self.entry_rules()
        self.R(tuple(self.fn.body), "1", self.omega, dict(self.info.refs))
        return self.rules

    # -------------------------------------------------------------- statements

    def R(self, stmts: tuple, pos: str, omega: TupleSeq, refs: dict):
        if not stmts:
            raise InternalError(f"{self.fn.name}: path without return at {pos}")
        s, rest = stmts[0], stmts[1:]
        env = self.env(omega, refs)
        sig = omega.sigma()
        here = var_fact(pos, sig)

        if isinstance(s, A.Assign):
            side: list = []
            new = self.assign_terms(s, omega, env, side)
            self.rule("var_assign", [here], side, [var_fact(pos + "1", new)], pos, s)
            self.R(rest, pos + "1", omega, refs)
        elif isinstance(s, A.Declare):
            if isinstance(s.ty, A.ContractRef):
                refs = {**refs, s.name: addr(s.ty.name)}
                self.R(rest, pos, omega, refs)  # no state change, no rule
                return
            side = []
            srt = sort_of(s.ty)
            if srt == Sort.MAP:
                raise UnsupportedExpr("local mappings are not supported", s.loc)
            if s.rhs is None:
                val = num(0) if srt == Sort.NUM else addr("0x0")
            else:
                val = self.coerce(theta_o(s.rhs, env, side), srt, s.loc)
            slot = VarTuple(Var(self.alloc(s.name), srt), TV, RL, EN, s.name)
            self.rule("var_declare", [here], side, [var_fact(pos + "1", sig + [val])], pos, s)
            self.R(rest, pos + "1", omega.append(slot), refs)
        elif isinstance(s, A.If):
            for positive, branch, k, kind in ((True, s.then, "1", "if_true"),
                                              (False, s.else_, "2", "if_false")):
                side = []
                acts = theta(s.cond, positive, env, side)
                if acts is None:
                    continue
                self.rule(kind, [here], side + acts, [var_fact(pos + k, sig)], pos, s)
                self.R(tuple(branch) + rest, pos + k, omega, refs)
        elif isinstance(s, A.Require):
            side = []
            acts = theta(s.cond, True, env, side)
            if acts is not None:
                self.rule("require_true", [here], side + acts, [var_fact(pos + "1", sig)], pos, s)
            nacts = theta(s.cond, False, env, side[:0])
            if nacts is not None:
                self.rule("require_false", [here], side + nacts, [], pos, s)
            if acts is not None:
                self.R(rest, pos + "1", omega, refs)
        elif isinstance(s, A.Return):
            self.rule("ret_ext", [here], [PredEq(self.calltype, EXT)],
                      [self.gvar_at(omega), self.evar_at(omega)], pos, s,
                      env=self.env(omega, refs))
            ret = Fact("Return", (self.info.atom, self.fconst, self.c_b, self.depth))
            self.rule("ret_in", [here], [PredEq(self.calltype, IN)],
                      [ret, self.gvar_at(omega), self.evar_at(omega)], pos, s)
        elif isinstance(s, A.InternalCall):
            self.internal_call(s, pos, omega, env, refs, rest)
        elif isinstance(s, A.Transfer):
            x, v, side = self.ether_operands(s, env)
            moved = self.moved(omega, x, v)
            guard = self.guard(v)
            self.rule("transfer_succ", [here], side + [guard], [var_fact(pos + "1", moved)], pos, s)
            self.rule("transfer_fail", [here], side, [], pos, s)
            self.R(rest, pos + "1", omega, refs)
        elif isinstance(s, A.Send):
            x, v, side = self.ether_operands(s, env)
            moved = self.moved(omega, x, v)
            self.rule("send_succ", [here], side + [self.guard(v)],
                      [var_fact(pos + "1", moved)], pos, s)
            if s.checked:
                self.rule("send_fail", [here], side, [], pos, s, checked=True)
            else:
                self.rule("send_fail", [here], side, [var_fact(pos + "2", sig)], pos, s)
            self.R(rest, pos + "1", omega, refs)
            if not s.checked:
                self.R(rest, pos + "2", omega, refs)
        elif isinstance(s, A.CallValue):
            self.call_value(s, pos, omega, env, refs, rest)
        elif isinstance(s, A.Loop):
            raise InternalError("loops must be unrolled before translation")
        else:
            raise InternalError(f"no translation for {type(s).__name__}")

    # -------------------------------------------------------------- pieces

    def gvar_at(self, omega) -> Fact:
        g = [t.name for t in omega if t.range == RG and t.ether != EY]
        return Fact("Gvar", (self.info.atom, *g))

    def evar_at(self, omega, eth=None) -> Fact:
        return Fact("Evar", (eth if eth is not None else omega.e()[0],))

    @staticmethod
    def coerce(t: Term, srt: Sort, loc) -> Term:
        if srt == Sort.ADDR and isinstance(t, Const) and t.sort == Sort.NUM:
            return addr(hex(t.value))
        if t.sort != srt:
            raise UnsupportedExpr(f"type mismatch: {srt.value} expected", loc)
        return t

    def assign_terms(self, s: A.Assign, omega, env, side) -> list:
        sig = omega.sigma()
        lhs = s.lhs
        if isinstance(lhs, A.Ident):
            k = omega.position(lhs.name)
            if k is None:
                raise UnsupportedExpr(f"cannot assign to '{lhs.name}'", s.loc)
            slot = omega.items[k]
            sig[k] = self.coerce(theta_o(s.rhs, env, side), slot.name.sort, s.loc)
            return sig
        if isinstance(lhs, A.Index):
            root = A.index_root(lhs)
            k = omega.position(root) if root else None
            if k is None or omega.items[k].name.sort != Sort.MAP:
                raise UnsupportedExpr("assignment target is not a mapping variable", s.loc)
            keys = tuple(theta_o(x, env, side) for x in A.index_keys(lhs))
            if any(x.sort != Sort.ADDR for x in keys):
                raise UnsupportedExpr("mapping keys must be addresses", s.loc)
            val = self.coerce(theta_o(s.rhs, env, side), Sort.NUM, s.loc)
            sig[k] = store(sig[k], keys, val)
            return sig
        raise UnsupportedExpr("unsupported assignment target", s.loc)

    def ether_operands(self, s, env):
        side: list = []
        x = theta_o(s.recipient, env, side)
        if x.sort != Sort.ADDR:
            raise UnsupportedExpr("ether recipient must be an address", s.loc)
        v = theta_o(s.amount, env, side)
        if v.sort != Sort.NUM:
            raise UnsupportedExpr("ether amount must be a number", s.loc)
        return x, v, side

    def moved_ether(self, eth: Term, x: Term, v: Term) -> Term:
        """Balance map after moving v from this contract to x."""
        c = self.info.atom
        e1 = store(eth, (c,), app("sub", select(eth, (c,)), v))
        return store(e1, (x,), app("add", select(e1, (x,)), v))

    def moved(self, omega, x, v) -> list:
        sig = omega.sigma()
        k = [i for i, t in enumerate(omega) if t.ether == EY][0]
        sig[k] = self.moved_ether(sig[k], x, v)
        return sig

    def guard(self, v: Term) -> NumFact:
        return NumFact(NumConstraint("le", v, select(self.eth, (self.info.atom,))))

    def internal_call(self, s: A.InternalCall, pos, omega, env, refs, rest):
        side: list = []
        args = tuple(theta_o(a, env, side) for a in s.args)
        expected = self.callee_params(s.target_contract, s.fn)
        if expected is not None:
            if len(expected) != len(args):
                raise UnsupportedExpr(f"wrong number of arguments to '{s.fn}'", s.loc)
            args = tuple(self.coerce(a, srt, s.loc) for a, srt in zip(args, expected))
        target = addr(s.target_contract)
        here = var_fact(pos, omega.sigma())
        local = omega.without_globals()
        call = Fact("Call_in", (target, fn_name(s.fn), self.info.atom,
                                app("add", self.depth, num(1)), *args))
        self.rule("in_call", [here], side,
                  [call, var_fact(pos + "1", local), self.gvar_at(omega), self.evar_at(omega)],
                  pos, s)
        r_depth = Var(self.alloc("r_depth"), Sort.NUM)
        ret = Fact("Return", (target, fn_name(s.fn), self.info.atom, r_depth))
        self.rule("recv_ret", [ret, var_fact(pos + "1", local), self.gvar_at(omega),
                               self.evar_at(omega)],
                  [PredEq(r_depth, app("add", self.depth, num(1)))],
                  [var_fact(pos + "11", omega.sigma())], pos, s)
        self.R(rest, pos + "11", omega, refs)

    def call_value(self, s: A.CallValue, pos, omega, env, refs, rest):
        x, v, side = self.ether_operands(s, env)
        sig = omega.sigma()
        here = var_fact(pos, sig)
        guard = self.guard(v)
        self.rule("ether_succ", [here], side + [guard],
                  [var_fact(pos + "1", self.moved(omega, x, v))], pos, s)
        if s.checked:
            self.rule("ether_fail", [here], side, [], pos, s, checked=True)
        else:
            self.rule("ether_fail", [here], side, [var_fact(pos + "2", sig)], pos, s)
        local = omega.without_globals()
        fb = Fact("Fallback", (self.info.atom, self.fconst, self.depth))
        self.rule("fb_call", [here], side + [PredEq(x, C_ADV), guard],
                  [var_fact(pos + "3", local), fb, self.gvar_at(omega),
                   self.evar_at(omega, self.moved_ether(self.eth, x, v))], pos, s)
        rfb = Fact("ReturnFallback", (self.info.atom, self.fconst, self.depth))
        self.rule("recv_fb_ret", [rfb, self.gvar_at(omega), self.evar_at(omega),
                                  var_fact(pos + "3", local)],
                  [], [var_fact(pos + "31", sig)], pos, s)
        self.R(rest, pos + "1", omega, refs)
        if not s.checked:
            self.R(rest, pos + "2", omega, refs)
        self.R(rest, pos + "31", omega, refs)


def translate_function(fn: A.FunctionDef, omega0: TupleSeq, info: ContractInfo | None = None,
                       callee_params=None) -> list:
    """Rules for one function (entry rules plus the statement rules)."""
    if info is None:
        raise InternalError("contract context required")
    if info.omega0 is not omega0:
        info = ContractInfo(info.ast, info.atom, omega0, info.constants, info.refs)
    return FunctionTranslator(info, fn, callee_params).translate()
