"""Bounded loop unrolling."""
from __future__ import annotations

from dataclasses import replace

from . import ast as A
from .errors import BoundExceeded, UnboundedLoop

UINT_MOD = 2 ** 256


def const_eval(e, env: dict):
    """Evaluate `e` using only literals and names bound in `env`; None if not constant."""
    if isinstance(e, A.Num):
        return e.value
    if isinstance(e, A.BoolLit):
        return int(e.value)
    if isinstance(e, A.Ident):
        return env.get(e.name)
    if isinstance(e, A.UnaryOp) and e.op == "!":
        v = const_eval(e.operand, env)
        return None if v is None else int(not v)
    if isinstance(e, A.BinOp):
        a, b = const_eval(e.left, env), const_eval(e.right, env)
        if a is None or b is None:
            return None
        op = e.op
        if op == "+":
            return (a + b) % UINT_MOD
        if op == "-":
            return (a - b) % UINT_MOD
        if op == "*":
            return (a * b) % UINT_MOD
        if op == "/":
            return None if b == 0 else a // b
        if op == "%":
            return None if b == 0 else a % b
        if op == "**":
            return pow(a, b, UINT_MOD)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        if op == "<":
            return int(a < b)
        if op == "<=":
            return int(a <= b)
        if op == ">":
            return int(a > b)
        if op == ">=":
            return int(a >= b)
        if op == "&&":
            return int(bool(a) and bool(b))
        if op == "||":
            return int(bool(a) or bool(b))
    return None


def subst_expr(e, name: str, value):
    if isinstance(e, A.Ident):
        return A.Num(value, e.loc) if e.name == name else e
    if isinstance(e, A.Index):
        return replace(e, base=subst_expr(e.base, name, value), key=subst_expr(e.key, name, value))
    if isinstance(e, A.BinOp):
        return replace(e, left=subst_expr(e.left, name, value),
                       right=subst_expr(e.right, name, value))
    if isinstance(e, A.UnaryOp):
        return replace(e, operand=subst_expr(e.operand, name, value))
    if isinstance(e, A.Balance):
        return replace(e, account=subst_expr(e.account, name, value))
    return e


def rename_expr(e, names: dict):
    if isinstance(e, A.Ident):
        return replace(e, name=names[e.name]) if e.name in names else e
    if isinstance(e, A.Index):
        return replace(e, base=rename_expr(e.base, names), key=rename_expr(e.key, names))
    if isinstance(e, A.BinOp):
        return replace(e, left=rename_expr(e.left, names), right=rename_expr(e.right, names))
    if isinstance(e, A.UnaryOp):
        return replace(e, operand=rename_expr(e.operand, names))
    if isinstance(e, A.Balance):
        return replace(e, account=rename_expr(e.account, names))
    return e


def map_stmt_exprs(s, f):
    """Apply `f` to every expression in a statement (recursing into blocks)."""
    if isinstance(s, A.Assign):
        return replace(s, lhs=f(s.lhs), rhs=f(s.rhs))
    if isinstance(s, A.Declare):
        return replace(s, rhs=f(s.rhs) if s.rhs is not None else None)
    if isinstance(s, A.If):
        return replace(s, cond=f(s.cond), then=tuple(map_stmt_exprs(x, f) for x in s.then),
                       else_=tuple(map_stmt_exprs(x, f) for x in s.else_))
    if isinstance(s, A.Require):
        return replace(s, cond=f(s.cond))
    if isinstance(s, A.Return):
        return replace(s, value=f(s.value) if s.value is not None else None)
    if isinstance(s, A.InternalCall):
        return replace(s, args=tuple(f(a) for a in s.args))
    if isinstance(s, (A.Transfer, A.Send, A.CallValue)):
        return replace(s, recipient=f(s.recipient), amount=f(s.amount))
    if isinstance(s, A.Loop):
        return replace(s, init=map_stmt_exprs(s.init, f) if s.init is not None else None,
                       cond=f(s.cond) if s.cond is not None else None,
                       step=map_stmt_exprs(s.step, f) if s.step is not None else None,
                       body=tuple(map_stmt_exprs(x, f) for x in s.body))
    return s


def _assigned_names(stmts) -> set:
    out = set()
    for s in A.walk_stmts(stmts):
        if isinstance(s, A.Assign) and isinstance(s.lhs, A.Ident):
            out.add(s.lhs.name)
    return out


def _declared_names(stmts) -> list:
    return [s.name for s in A.walk_stmts(stmts) if isinstance(s, A.Declare)]


def _loop_var(loop: A.Loop):
    init = loop.init
    if isinstance(init, A.Declare) and init.rhs is not None:
        return init.name, init.rhs, True
    if isinstance(init, A.Declare):
        return init.name, A.Num(0), True
    if isinstance(init, A.Assign) and isinstance(init.lhs, A.Ident):
        return init.lhs.name, init.rhs, False
    return None, None, False


def trip_values(loop: A.Loop, bound: int) -> list:
    """Values taken by the loop variable in each iteration."""
    loc = loop.loc
    var, init, _ = _loop_var(loop)
    if var is None or loop.cond is None or loop.step is None:
        raise UnboundedLoop("loop header is not of the form 'i = c; cond; step'",
                            loc.line, loc.col)
    val = const_eval(init, {})
    if val is None:
        raise UnboundedLoop("loop start value is not a constant", loc.line, loc.col)
    step = loop.step
    if not (isinstance(step, A.Assign) and isinstance(step.lhs, A.Ident)
            and step.lhs.name == var):
        raise UnboundedLoop("loop step must update the loop variable", loc.line, loc.col)
    if var in _assigned_names(loop.body):
        raise UnboundedLoop(f"loop variable '{var}' is assigned in the body", loc.line, loc.col)
    values = []
    while True:
        c = const_eval(loop.cond, {var: val})
        if c is None:
            raise UnboundedLoop("trip count cannot be determined statically", loc.line, loc.col)
        if not c:
            return values
        values.append(val)
        if len(values) > bound:
            raise BoundExceeded(f"loop runs more than {bound} iterations", loc.line, loc.col)
        val = const_eval(step.rhs, {var: val})
        if val is None:
            raise UnboundedLoop("loop step is not constant", loc.line, loc.col)


def unroll_stmts(stmts, bound: int) -> tuple:
    out = []
    for s in stmts:
        if isinstance(s, A.If):
            out.append(replace(s, then=unroll_stmts(s.then, bound),
                               else_=unroll_stmts(s.else_, bound)))
        elif isinstance(s, A.Loop):
            body = unroll_stmts(s.body, bound)
            loop = replace(s, body=body)
            values = trip_values(loop, bound)
            var, _, declared = _loop_var(loop)
            locals_ = _declared_names(body)
            for k, v in enumerate(values):
                names = {n: f"{n}_{k}" for n in locals_}
                for b in body:
                    b = map_stmt_exprs(b, lambda e: subst_expr(e, var, v))
                    b = map_stmt_exprs(b, lambda e: rename_expr(e, names))
                    out.append(_rename_decls(b, names))
            if not declared:
                if values:
                    final = const_eval(loop.step.rhs, {var: values[-1]})
                else:
                    final = const_eval(_loop_var(loop)[1], {})
                out.append(A.Assign(A.Ident(var), A.Num(final), s.loc))
        else:
            out.append(s)
    return tuple(out)


def _rename_decls(s, names):
    if isinstance(s, A.Declare) and s.name in names:
        return replace(s, name=names[s.name])
    if isinstance(s, A.If):
        return replace(s, then=tuple(_rename_decls(x, names) for x in s.then),
                       else_=tuple(_rename_decls(x, names) for x in s.else_))
    return s


def unroll_loops(contract: A.ContractAst, bound: int) -> A.ContractAst:
    """Replace every constant-trip loop by straight-line code (at most `bound` copies)."""
    if bound < 1:
        raise ValueError("unroll bound must be positive")
    fns = tuple(replace(f, body=unroll_stmts(f.body, bound)) for f in contract.functions)
    return replace(contract, functions=fns)


def has_loops(contract: A.ContractAst) -> bool:
    return any(isinstance(s, A.Loop) for f in contract.functions for s in A.walk_stmts(f.body))
