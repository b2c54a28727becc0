"""Expression translation: Solidity expressions to terms and constraint actions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast as A
from ..msr.facts import NumConstraint, NumFact, PredEq, PredNeq
from ..msr.terms import Const, Sort, Term, Var, addr, app, num, select
from ..msr.tuples import TupleSeq


class UnsupportedExpr(Exception):
    def __init__(self, message, loc=None):
        super().__init__(message)
        self.loc = loc or A.Loc()


class InternalError(Exception):
    pass


ARITH = {"+": "add", "-": "sub", "*": "mul", "/": "div", "%": "mod", "**": "pow"}


@dataclass
class Env:
    """Name resolution for one program point of one function."""
    contract: Const
    omega: TupleSeq
    c_b: Optional[Term] = None
    eth: Optional[Term] = None
    bt: Optional[Term] = None
    constants: dict = field(default_factory=dict)
    refs: dict = field(default_factory=dict)  # contract-typed names -> contract atom

    def lookup(self, name: str, loc=None) -> Term:
        k = self.omega.position(name)
        if k is not None:
            return self.omega.items[k].name
        if name in self.constants:
            return self.constants[name]
        if name in self.refs:
            return self.refs[name]
        raise UnsupportedExpr(f"unknown identifier '{name}'", loc)


def theta_o(e, env: Env, side: list) -> Term:
    """θ_o: translate a value expression; zero-divisor guards are appended to `side`."""
    if isinstance(e, A.Num):
        return num(e.value)
    if isinstance(e, A.BoolLit):
        return num(int(e.value))
    if isinstance(e, A.AddressLit):
        return addr(e.value)
    if isinstance(e, A.Ident):
        return env.lookup(e.name, e.loc)
    if isinstance(e, A.Index):
        root = A.index_root(e)
        if root is None:
            raise UnsupportedExpr("indexing a non-variable", e.loc)
        m = env.lookup(root, e.loc)
        if m.sort != Sort.MAP:
            raise UnsupportedExpr(f"'{root}' is not a mapping", e.loc)
        keys = tuple(theta_o(k, env, side) for k in A.index_keys(e))
        for k in keys:
            if k.sort != Sort.ADDR:
                raise UnsupportedExpr("mapping keys must be addresses", e.loc)
        return select(m, keys)
    if isinstance(e, A.BinOp) and e.op in ARITH:
        l, r = theta_o(e.left, env, side), theta_o(e.right, env, side)
        if l.sort != Sort.NUM or r.sort != Sort.NUM:
            raise UnsupportedExpr(f"arithmetic '{e.op}' on non-numeric operands", e.loc)
        op = ARITH[e.op]
        if op in ("div", "mod") and not (isinstance(r, Const) and r.value != 0):
            side.append(NumFact(NumConstraint("neq", r, num(0))))
        return app(op, l, r)
    if isinstance(e, A.MsgSender):
        return env.c_b
    if isinstance(e, A.This):
        return env.contract
    if isinstance(e, A.Balance):
        who = theta_o(e.account, env, side)
        if who.sort != Sort.ADDR:
            raise UnsupportedExpr("'.balance' of a non-address", e.loc)
        return select(env.eth, (who,))
    if isinstance(e, A.BlockTimestamp):
        if env.bt is None:
            raise InternalError("timestamp slot missing")
        return env.bt
    if isinstance(e, A.UnaryOp):
        raise UnsupportedExpr(f"unary '{e.op}' in a value position", e.loc)
    if isinstance(e, A.BinOp):
        raise UnsupportedExpr(f"boolean operator '{e.op}' in a value position", e.loc)
    raise UnsupportedExpr(f"unsupported expression {type(e).__name__}", getattr(e, "loc", None))


_POS = {"==": ("eq", False), "!=": ("neq", False), "<": ("lt", False),
        "<=": ("le", False), ">": ("lt", True), ">=": ("le", True)}


def _coerce_addr(t: Term) -> Term:
    if isinstance(t, Const) and t.sort == Sort.NUM:
        return addr(hex(t.value))
    return t


def theta(cond, positive: bool, env: Env, side: list):
    """θ_e (positive) / θ_ne (negative) of a normalized condition.

    Returns the list of actions, or None when the condition is constantly
    false under this polarity (the rule can never fire).
    """
    if isinstance(cond, A.BoolLit):
        return [] if cond.value == positive else None
    if not (isinstance(cond, A.BinOp) and cond.op in _POS):
        raise InternalError(f"condition not normalized: {cond!r}")
    l, r = theta_o(cond.left, env, side), theta_o(cond.right, env, side)
    if Sort.ADDR in (l.sort, r.sort):
        l, r = _coerce_addr(l), _coerce_addr(r)
        if l.sort != r.sort:
            raise UnsupportedExpr("comparison between an address and a number", cond.loc)
        if cond.op not in ("==", "!="):
            raise UnsupportedExpr("ordering comparison on addresses", cond.loc)
        eq = (cond.op == "==") == positive
        return [PredEq(l, r) if eq else PredNeq(l, r)]
    rel, swap = _POS[cond.op]
    c = NumConstraint(rel, r, l) if swap else NumConstraint(rel, l, r)
    if not positive:
        c = c.negate()
    return [NumFact(c)]


def reads_timestamp(stmts) -> bool:
    for s in A.walk_stmts(stmts):
        for e in A.stmt_exprs(s):
            if any(isinstance(x, A.BlockTimestamp) for x in A.walk_expr(e)):
                return True
    return False


__all__ = ["Env", "theta", "theta_o", "UnsupportedExpr", "InternalError", "reads_timestamp",
           "Var"]
