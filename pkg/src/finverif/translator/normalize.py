"""Rewrite boolean structure so that every branch condition is one comparison.

`&&`, `||` and `!` become nested ifs; bare boolean values become `!= 0`
tests; assignments of boolean expressions become two-armed ifs storing 1/0.
"""
from __future__ import annotations

from dataclasses import replace

from ..frontend import ast as A

_FLIP = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def is_boolean(e) -> bool:
    if isinstance(e, A.BoolLit):
        return True
    if isinstance(e, A.BinOp):
        return e.op in A.REL_OPS or e.op in A.BOOL_OPS
    if isinstance(e, A.UnaryOp):
        return e.op == "!"
    return False


def cond_tree(e, positive: bool = True):
    """('rel', BinOp) | ('const', bool) | ('and'|'or', l, r), negations pushed inward."""
    if isinstance(e, A.BoolLit):
        return ("const", e.value == positive)
    if isinstance(e, A.UnaryOp) and e.op == "!":
        return cond_tree(e.operand, not positive)
    if isinstance(e, A.BinOp) and e.op in A.BOOL_OPS:
        l, r = cond_tree(e.left, positive), cond_tree(e.right, positive)
        conj = (e.op == "&&") == positive
        return ("and", l, r) if conj else ("or", l, r)
    if isinstance(e, A.BinOp) and e.op in A.REL_OPS:
        op = e.op if positive else _FLIP[e.op]
        return ("rel", replace(e, op=op))
    # numeric value used as a boolean
    zero = A.Num(0, getattr(e, "loc", A.Loc()))
    return ("rel", A.BinOp("!=" if positive else "==", e, zero, getattr(e, "loc", A.Loc())))


def compile_if(tree, then: tuple, else_: tuple, loc) -> tuple:
    kind = tree[0]
    if kind == "const":
        return then if tree[1] else else_
    if kind == "rel":
        return (A.If(tree[1], then, else_, loc),)
    if kind == "and":
        inner = compile_if(tree[2], then, else_, loc)
        return compile_if(tree[1], inner, else_, loc)
    inner = compile_if(tree[2], then, else_, loc)
    return compile_if(tree[1], then, inner, loc)


def compile_require(tree, loc) -> tuple:
    kind = tree[0]
    if kind == "const":
        return () if tree[1] else (A.Require(A.BoolLit(False, loc), loc),)
    if kind == "rel":
        return (A.Require(tree[1], loc),)
    if kind == "and":
        return compile_require(tree[1], loc) + compile_require(tree[2], loc)
    # a || b: if (a) {} else { require(b) }
    return compile_if(tree[1], (), compile_require(tree[2], loc), loc)


def normalize_stmts(stmts) -> tuple:
    out = []
    for s in stmts:
        if isinstance(s, A.If):
            out.extend(compile_if(cond_tree(s.cond), normalize_stmts(s.then),
                                  normalize_stmts(s.else_), s.loc))
        elif isinstance(s, A.Require):
            out.extend(compile_require(cond_tree(s.cond), s.loc))
        elif isinstance(s, A.Assign) and is_boolean(s.rhs):
            out.extend(_bool_store(s.lhs, s.rhs, s.loc))
        elif isinstance(s, A.Declare) and s.rhs is not None and is_boolean(s.rhs):
            out.append(replace(s, rhs=A.Num(0, s.loc)))
            out.extend(_bool_store(A.Ident(s.name, s.loc), s.rhs, s.loc))
        elif isinstance(s, A.Return):
            out.append(replace(s, value=None))
            break  # anything after a return is dead
        else:
            out.append(s)
    return tuple(out)


def _bool_store(lhs, rhs, loc) -> tuple:
    one = (A.Assign(lhs, A.Num(1, loc), loc),)
    zero = (A.Assign(lhs, A.Num(0, loc), loc),)
    return compile_if(cond_tree(rhs), one, zero, loc)


def normalize_function(fn: A.FunctionDef) -> A.FunctionDef:
    return replace(fn, body=normalize_stmts(fn.body))
