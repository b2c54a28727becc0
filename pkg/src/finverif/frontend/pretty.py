"""Render an AST back to Solidity source accepted by the parser."""
from __future__ import annotations

from . import ast as A


def type_str(ty) -> str:
    if isinstance(ty, A.UInt):
        return f"uint{ty.bits}"
    if isinstance(ty, A.Address):
        return "address payable" if ty.payable else "address"
    if isinstance(ty, A.Bool):
        return "bool"
    if isinstance(ty, A.Mapping):
        return f"mapping({type_str(ty.key)} => {type_str(ty.val)})"
    if isinstance(ty, A.ContractRef):
        return ty.name
    raise TypeError(ty)


def expr_str(e) -> str:
    if isinstance(e, A.Num):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.AddressLit):
        return f"address({e.value})"
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.Index):
        return f"{atom_str(e.base)}[{expr_str(e.key)}]"
    if isinstance(e, A.BinOp):
        return f"({expr_str(e.left)} {e.op} {expr_str(e.right)})"
    if isinstance(e, A.UnaryOp):
        return f"{e.op}({expr_str(e.operand)})"
    if isinstance(e, A.MsgSender):
        return "msg.sender"
    if isinstance(e, A.BlockTimestamp):
        return "block.timestamp"
    if isinstance(e, A.Balance):
        return f"{atom_str(e.account)}.balance"
    if isinstance(e, A.This):
        return "this"
    raise TypeError(e)


def atom_str(e) -> str:
    s = expr_str(e)
    if isinstance(e, (A.Ident, A.Index, A.MsgSender, A.This, A.BlockTimestamp)):
        return s
    if isinstance(e, A.BinOp):
        return s  # already parenthesized
    return f"({s})"


def stmt_lines(s, ind: str) -> list:
    if isinstance(s, A.Assign):
        return [f"{ind}{expr_str(s.lhs)} = {expr_str(s.rhs)};"]
    if isinstance(s, A.Declare):
        if s.rhs is None:
            return [f"{ind}{type_str(s.ty)} {s.name};"]
        return [f"{ind}{type_str(s.ty)} {s.name} = {expr_str(s.rhs)};"]
    if isinstance(s, A.If):
        out = [f"{ind}if ({expr_str(s.cond)}) {{"]
        out += block_lines(s.then, ind + "    ")
        out.append(f"{ind}}} else {{")
        out += block_lines(s.else_, ind + "    ")
        out.append(f"{ind}}}")
        return out
    if isinstance(s, A.Require):
        return [f"{ind}require({expr_str(s.cond)});"]
    if isinstance(s, A.Return):
        if s.value is None:
            return [f"{ind}return;"]
        return [f"{ind}return {expr_str(s.value)};"]
    if isinstance(s, A.InternalCall):
        args = ", ".join(expr_str(a) for a in s.args)
        if s.via:
            return [f"{ind}{s.via}.{s.fn}({args});"]
        return [f"{ind}{s.target_contract}(address(this)).{s.fn}({args});"]
    if isinstance(s, A.Transfer):
        return [f"{ind}{atom_str(s.recipient)}.transfer({expr_str(s.amount)});"]
    if isinstance(s, A.Send):
        call = f"{atom_str(s.recipient)}.send({expr_str(s.amount)})"
        return [f"{ind}require({call});" if s.checked else f"{ind}{call};"]
    if isinstance(s, A.CallValue):
        call = f"{atom_str(s.recipient)}.call.value({expr_str(s.amount)})()"
        return [f"{ind}require({call});" if s.checked else f"{ind}{call};"]
    if isinstance(s, A.Loop):
        init = stmt_lines(s.init, "")[0] if s.init is not None else ";"
        cond = expr_str(s.cond) if s.cond is not None else ""
        step = stmt_lines(s.step, "")[0].rstrip(";") if s.step is not None else ""
        out = [f"{ind}for ({init} {cond}; {step}) {{"]
        out += block_lines(s.body, ind + "    ")
        out.append(f"{ind}}}")
        return out
    raise TypeError(s)


def block_lines(stmts, ind: str) -> list:
    out = []
    for s in stmts:
        out += stmt_lines(s, ind)
    return out


def function_lines(fn: A.FunctionDef, created: tuple, ind: str) -> list:
    params = ", ".join(f"{type_str(t)} {n}" for n, t in fn.params)
    mods = [fn.visibility]
    if fn.payable:
        mods.append("payable")
    if fn.mutability:
        mods.append(fn.mutability)
    head = "constructor" if fn.is_constructor else f"function {fn.name}"
    out = [f"{ind}{head}({params}) {' '.join(mods)} {{"]
    if fn.is_constructor:
        for i, name in enumerate(created):
            out.append(f"{ind}    _created{i} = new {name}();")
    out += block_lines(fn.body, ind + "    ")
    out.append(f"{ind}}}")
    return out


def pretty_contract(c: A.ContractAst) -> str:
    out = [f"contract {c.name} {{"]
    for g in c.globals:
        const = " constant" if g.constant else ""
        init = f" = {expr_str(g.init)}" if g.init is not None else ""
        out.append(f"    {type_str(g.ty)}{const} {g.name}{init};")
    has_ctor = any(f.is_constructor for f in c.functions)
    if c.created_contracts and not has_ctor:
        out += function_lines(A.FunctionDef("constructor", (), (), is_constructor=True),
                              c.created_contracts, "    ")
    for fn in c.functions:
        out += function_lines(fn, c.created_contracts, "    ")
    out.append("}")
    return "\n".join(out) + "\n"


def pretty_source(contracts) -> str:
    return "\n".join(pretty_contract(c) for c in contracts)
