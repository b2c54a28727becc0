"""AST for the supported Solidity subset.

Source locations are carried on nodes but excluded from equality, so two
parses of differently formatted but equivalent sources compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Loc:
    line: int = 0
    col: int = 0


def _loc() -> Loc:
    return field(default_factory=Loc, compare=False, repr=False)


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class UInt:
    bits: int = field(default=256, compare=False)


@dataclass(frozen=True)
class Address:
    payable: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class Mapping:
    key: "SolType"
    val: "SolType"


@dataclass(frozen=True)
class ContractRef:
    name: str


SolType = Union[UInt, Address, Bool, Mapping, ContractRef]


def mapping_depth(ty: SolType) -> int:
    n = 0
    while isinstance(ty, Mapping):
        n += 1
        ty = ty.val
    return n


def mapping_leaf(ty: SolType) -> SolType:
    while isinstance(ty, Mapping):
        ty = ty.val
    return ty


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Num:
    value: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    loc: Loc = _loc()


@dataclass(frozen=True)
class AddressLit:
    """`address(0)` or a hex address literal; value is the normalized hex."""
    value: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Ident:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Index:
    base: "Expr"
    key: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class UnaryOp:
    op: str
    operand: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class MsgSender:
    loc: Loc = _loc()


@dataclass(frozen=True)
class BlockTimestamp:
    loc: Loc = _loc()


@dataclass(frozen=True)
class Balance:
    account: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class This:
    loc: Loc = _loc()


BuiltinRef = Union[MsgSender, BlockTimestamp, Balance]
Expr = Union[Num, BoolLit, AddressLit, Ident, Index, BinOp, UnaryOp,
             MsgSender, BlockTimestamp, Balance, This]

ARITH_OPS = ("+", "-", "*", "/", "%", "**")
REL_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_OPS = ("&&", "||")


# ---------------------------------------------------------------- statements

@dataclass(frozen=True)
class Assign:
    lhs: Union[Ident, Index]
    rhs: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Declare:
    ty: SolType
    name: str
    rhs: Optional[Expr]
    loc: Loc = _loc()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    else_: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class Require:
    cond: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class InternalCall:
    """`X(addr).f(args)` or `ref.f(args)` where `ref` has a contract type."""
    target_contract: str
    fn: str
    args: tuple
    via: Optional[str] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class Transfer:
    recipient: Expr
    amount: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Send:
    recipient: Expr
    amount: Expr
    checked: bool = False
    loc: Loc = _loc()


@dataclass(frozen=True)
class CallValue:
    recipient: Expr
    amount: Expr
    checked: bool = False
    loc: Loc = _loc()


@dataclass(frozen=True)
class Loop:
    init: Optional["Stmt"]
    cond: Optional[Expr]
    step: Optional["Stmt"]
    body: tuple
    loc: Loc = _loc()


Stmt = Union[Assign, Declare, If, Require, Return, InternalCall, Transfer,
             Send, CallValue, Loop]
StmtSeq = tuple


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class VarDecl:
    name: str
    ty: SolType
    init: Optional[Expr] = None
    constant: bool = False
    loc: Loc = _loc()


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple  # of (name, SolType)
    body: tuple
    payable: bool = False
    visibility: str = "public"
    is_constructor: bool = False
    mutability: Optional[str] = None
    loc: Loc = _loc()

    def param_names(self) -> list:
        return [p for p, _ in self.params]


@dataclass(frozen=True)
class ContractAst:
    name: str
    globals: tuple
    functions: tuple
    created_contracts: tuple = ()
    loc: Loc = _loc()

    def function(self, name: str) -> FunctionDef:
        for fn in self.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def global_decl(self, name: str) -> Optional[VarDecl]:
        for g in self.globals:
            if g.name == name:
                return g
        return None

    @property
    def entry_functions(self) -> list:
        return [f for f in self.functions if not f.is_constructor]

    @property
    def state_globals(self) -> list:
        """Globals that live in contract storage (not constants or contract refs)."""
        return [g for g in self.globals
                if not g.constant and not isinstance(g.ty, ContractRef)]


def walk_stmts(stmts):
    """Yield every statement, descending into if/loop bodies."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then)
            yield from walk_stmts(s.else_)
        elif isinstance(s, Loop):
            if s.init is not None:
                yield s.init
            if s.step is not None:
                yield s.step
            yield from walk_stmts(s.body)


def walk_expr(e):
    yield e
    if isinstance(e, Index):
        yield from walk_expr(e.base)
        yield from walk_expr(e.key)
    elif isinstance(e, BinOp):
        yield from walk_expr(e.left)
        yield from walk_expr(e.right)
    elif isinstance(e, UnaryOp):
        yield from walk_expr(e.operand)
    elif isinstance(e, Balance):
        yield from walk_expr(e.account)


def stmt_exprs(s):
    """Top-level expressions directly held by a statement."""
    if isinstance(s, Assign):
        return [s.lhs, s.rhs]
    if isinstance(s, Declare):
        return [s.rhs] if s.rhs is not None else []
    if isinstance(s, (If, Require)):
        return [s.cond]
    if isinstance(s, Return):
        return [s.value] if s.value is not None else []
    if isinstance(s, InternalCall):
        return list(s.args)
    if isinstance(s, (Transfer, Send, CallValue)):
        return [s.recipient, s.amount]
    if isinstance(s, Loop):
        return [s.cond] if s.cond is not None else []
    return []


def index_root(e) -> Optional[str]:
    """Name of the mapping at the bottom of an index chain `m[a][b]`."""
    while isinstance(e, Index):
        e = e.base
    return e.name if isinstance(e, Ident) else None


def index_keys(e) -> list:
    keys = []
    while isinstance(e, Index):
        keys.append(e.key)
        e = e.base
    return list(reversed(keys))
