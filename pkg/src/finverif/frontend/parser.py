"""Recursive-descent parser for the supported Solidity subset."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

from . import ast as A
from .errors import SolSyntaxError, UnsupportedFeature
from .lexer import ETHER_UNITS, TIME_UNITS, Token, tokenize

_UINT_RE = re.compile(r"^uint(\d*)$")
_INT_RE = re.compile(r"^int(\d*)$")
_BYTES_RE = re.compile(r"^bytes(\d*)$")
ASSIGN_OPS = {"=": None, "+=": "+", "-=": "-", "*=": "*", "/=": "/", "%=": "%",
              "**=": "**"}
VISIBILITIES = ("public", "private", "internal", "external")
MUTABILITY = ("view", "pure", "constant")


# Intermediate call-shaped expressions; only statement contexts accept them.
@dataclass(frozen=True)
class _Member:
    base: object
    name: str
    loc: A.Loc


@dataclass(frozen=True)
class _Call:
    callee: object
    args: tuple
    opts: tuple
    loc: A.Loc


@dataclass(frozen=True)
class _New:
    name: str
    loc: A.Loc


class Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.pos = 0
        self.contract_names: set = set()
        self.in_constructor = False
        self.created: list = []

    # ------------------------------------------------------------ helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text, kind=None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != "str"

    def next(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected '{text}' but found {self.describe(self.tok)}")
        return self.next()

    def expect_ident(self) -> Token:
        t = self.tok
        if t.kind != "id":
            self.error(f"expected identifier but found {self.describe(t)}")
        return self.next()

    def accept(self, text) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else f"'{t.text}'"

    def error(self, msg, tok=None):
        t = tok or self.tok
        raise SolSyntaxError(msg, t.line, t.col)

    def unsupported(self, msg, tok=None):
        t = tok or self.tok
        raise UnsupportedFeature(msg, t.line, t.col)

    @staticmethod
    def loc(t: Token) -> A.Loc:
        return A.Loc(t.line, t.col)

    # ------------------------------------------------------------ source unit
    def parse_source(self) -> list:
        # First pass over the token stream to know every contract name.
        for i, t in enumerate(self.toks[:-1]):
            if t.text == "contract" and t.kind == "kw" and self.toks[i + 1].kind == "id":
                self.contract_names.add(self.toks[i + 1].text)
        contracts = []
        while self.tok.kind != "eof":
            if self.at("pragma"):
                while not self.at(";"):
                    if self.tok.kind == "eof":
                        self.error("unterminated pragma")
                    self.next()
                self.next()
            elif self.at("contract"):
                contracts.append(self.parse_contract())
            elif self.tok.text in ("library", "interface", "import"):
                self.unsupported(f"'{self.tok.text}' is not supported")
            else:
                self.error(f"expected 'contract' but found {self.describe(self.tok)}")
        if not contracts:
            t = self.toks[0]
            raise SolSyntaxError("expected a contract definition", t.line, t.col)
        names = [c.name for c in contracts]
        if len(set(names)) != len(names):
            self.error("duplicate contract name", self.toks[0])
        return contracts

    def parse_contract(self) -> A.ContractAst:
        start = self.expect("contract")
        name = self.expect_ident().text
        if self.at("is"):
            self.unsupported("inheritance is not supported")
        self.expect("{")
        globals_, functions = [], []
        self.created = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated contract body")
            t = self.tok
            if t.text == "function":
                fn = self.parse_function(name)
                if fn is not None:
                    functions.append(fn)
            elif t.text == "constructor":
                functions.append(self.parse_constructor())
            elif t.text in ("fallback", "receive"):
                self.next()
                self.parse_params()
                self.parse_modifiers()
                self.parse_block()
            elif t.text == "event":
                while not self.at(";"):
                    self.next()
                self.next()
            elif t.text in ("modifier", "struct", "enum", "using", "assembly"):
                self.unsupported(f"'{t.text}' is not supported")
            else:
                globals_.append(self.parse_state_var())
        self.expect("}")
        seen = set()
        for g in globals_:
            if g.name in seen:
                raise SolSyntaxError(f"duplicate global '{g.name}'", g.loc.line, g.loc.col)
            seen.add(g.name)
        fseen = set()
        ctors = 0
        for f in functions:
            if f.is_constructor:
                ctors += 1
                if ctors > 1:
                    raise SolSyntaxError("more than one constructor", f.loc.line, f.loc.col)
                continue
            if f.name in fseen:
                raise SolSyntaxError(f"duplicate function '{f.name}'", f.loc.line, f.loc.col)
            fseen.add(f.name)
        contract = A.ContractAst(name, tuple(globals_), tuple(functions),
                                 tuple(dict.fromkeys(self.created)), self.loc(start))
        return _resolve_refs(contract, self.contract_names)

    def parse_state_var(self) -> A.VarDecl:
        t = self.tok
        ty = self.parse_type()
        constant = False
        while self.tok.text in VISIBILITIES + ("constant", "immutable"):
            if self.next().text in ("constant", "immutable"):
                constant = True
        name = self.expect_ident().text
        init = None
        if self.accept("="):
            init = self.parse_expr()
            if isinstance(init, _New):
                self.unsupported("contract creation in a global initializer is not supported", t)
            init = self.plain(init)
        self.expect(";")
        return A.VarDecl(name, ty, init, constant, self.loc(t))

    def parse_type(self) -> A.SolType:
        t = self.tok
        if t.text == "mapping":
            self.next()
            self.expect("(")
            key = self.parse_type()
            self.expect("=>")
            val = self.parse_type()
            self.expect(")")
            return A.Mapping(key, val)
        if t.text == "address":
            self.next()
            return A.Address(payable=self.accept("payable"))
        if t.text == "bool":
            self.next()
            return A.Bool()
        if t.kind == "id":
            m = _UINT_RE.match(t.text)
            if m:
                self.next()
                bits = int(m.group(1) or 256)
                if bits % 8 or not 8 <= bits <= 256:
                    self.error(f"invalid integer type '{t.text}'", t)
                return A.UInt(bits)
            if _INT_RE.match(t.text):
                self.unsupported("signed integer types are not supported", t)
            if t.text in ("string", "bytes") or _BYTES_RE.match(t.text):
                self.unsupported(f"type '{t.text}' is not supported", t)
            self.next()
            if self.at("["):
                self.unsupported("arrays are not supported")
            return A.ContractRef(t.text)
        self.error(f"expected a type but found {self.describe(t)}")

    def is_type_start(self) -> bool:
        t = self.tok
        if t.text in ("mapping", "address", "bool") and t.kind == "kw":
            # `address(x)` is a cast, not a declaration
            return not (t.text == "address" and self.peek().text == "(")
        if t.kind == "id":
            if _UINT_RE.match(t.text) or _INT_RE.match(t.text) or t.text in ("string", "bytes"):
                return not self.peek().text == "("
            nxt = self.peek()
            return nxt.kind == "id" or nxt.text in ("memory", "storage")
        return False

    def parse_params(self) -> tuple:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ty = self.parse_type()
                while self.tok.text in ("memory", "storage", "calldata", "payable"):
                    self.next()
                pname = self.expect_ident().text if self.tok.kind == "id" else f"_{len(params)}"
                params.append((pname, ty))
                if not self.accept(","):
                    break
        self.expect(")")
        names = [p for p, _ in params]
        if len(set(names)) != len(names):
            self.error("duplicate parameter name")
        return tuple(params)

    def parse_modifiers(self):
        payable, vis, mut = False, "public", None
        while True:
            t = self.tok
            if t.text == "payable":
                payable = True
            elif t.text in VISIBILITIES:
                vis = t.text
            elif t.text in MUTABILITY:
                mut = t.text
            elif t.text == "returns":
                self.next()
                self.parse_params()
                continue
            elif t.kind == "id" and self.peek().text in ("(", "{", ";") or (
                    t.kind == "id" and self.peek().kind in ("kw", "id")):
                self.unsupported(f"function modifier '{t.text}' is not supported")
            else:
                break
            self.next()
        return payable, vis, mut

    def parse_function(self, contract_name):
        start = self.expect("function")
        if self.at("("):
            # legacy unnamed fallback function: not modeled
            self.parse_params()
            self.parse_modifiers()
            self.parse_block()
            return None
        name = self.expect_ident().text
        params = self.parse_params()
        payable, vis, mut = self.parse_modifiers()
        if name == contract_name:
            self.in_constructor = True
            try:
                body = with_trailing_return(self.parse_block())
            finally:
                self.in_constructor = False
            return A.FunctionDef("constructor", params, body, payable, vis, True, mut,
                                 self.loc(start))
        if self.accept(";"):
            self.unsupported("functions without a body are not supported", start)
        body = with_trailing_return(self.parse_block())
        return A.FunctionDef(name, params, body, payable, vis, False, mut, self.loc(start))

    def parse_constructor(self):
        start = self.expect("constructor")
        params = self.parse_params()
        payable, vis, mut = self.parse_modifiers()
        self.in_constructor = True
        try:
            body = with_trailing_return(self.parse_block())
        finally:
            self.in_constructor = False
        return A.FunctionDef("constructor", params, body, payable, vis, True, mut,
                             self.loc(start))

    # ------------------------------------------------------------ statements
    def parse_block(self) -> tuple:
        self.expect("{")
        out = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block")
            out.extend(self.parse_stmt())
        self.expect("}")
        return tuple(out)

    def parse_body(self) -> tuple:
        if self.at("{"):
            return self.parse_block()
        return tuple(self.parse_stmt())

    def parse_stmt(self) -> list:
        t = self.tok
        loc = self.loc(t)
        text = t.text if t.kind in ("kw", "op") else None
        if text == "{":
            return list(self.parse_block())
        if text == ";":
            self.next()
            return []
        if text == "if":
            return [self.parse_if()]
        if text == "for":
            return [self.parse_for()]
        if text == "while":
            self.unsupported("unbounded loop: 'while' loops are not supported")
        if text == "do":
            self.unsupported("unbounded loop: 'do' loops are not supported")
        if text == "return":
            self.next()
            val = None
            if not self.at(";"):
                val = self.plain(self.parse_expr())
            self.expect(";")
            return [A.Return(val, loc)]
        if text in ("require", "assert"):
            self.next()
            self.expect("(")
            cond = self.parse_expr()
            if self.accept(","):
                if self.tok.kind != "str":
                    self.error("expected a reason string")
                self.next()
            self.expect(")")
            self.expect(";")
            send = self.as_ether_call(cond, checked=True)
            if send is not None:
                return [send]
            return [A.Require(self.plain(cond), loc)]
        if text in ("revert", "throw"):
            self.next()
            if text == "revert":
                self.expect("(")
                if self.tok.kind == "str":
                    self.next()
                self.expect(")")
            self.expect(";")
            return [A.Require(A.BoolLit(False, loc), loc)]
        if text == "emit":
            while not self.at(";"):
                if self.tok.kind == "eof":
                    self.error("unterminated emit statement")
                self.next()
            self.next()
            return []
        if text == "delete":
            self.next()
            target = self.plain(self.parse_expr())
            self.expect(";")
            return [A.Assign(self.lvalue(target, t), A.Num(0, loc), loc)]
        if text in ("assembly",):
            self.unsupported("inline assembly is not supported")
        if t.kind == "id" and t.text in ("break", "continue"):
            self.unsupported(f"'{t.text}' is not supported")
        if self.is_type_start():
            return [self.parse_decl()]
        return [self.parse_expr_stmt()]

    def parse_decl(self) -> A.Declare:
        t = self.tok
        ty = self.parse_type()
        while self.tok.text in ("memory", "storage"):
            self.next()
        name = self.expect_ident().text
        rhs = None
        if self.accept("="):
            e = self.parse_expr()
            if isinstance(e, _New):
                self.unsupported("dynamic contract creation is not supported", t)
            rhs = self.plain(e)
        self.expect(";")
        if isinstance(ty, A.Mapping):
            self.unsupported("local mappings are not supported", t)
        return A.Declare(ty, name, rhs, self.loc(t))

    def parse_if(self) -> A.If:
        t = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_body()
        else_ = ()
        if self.accept("else"):
            else_ = self.parse_body()
        # `if (!x.send(v)) revert;` is a checked send
        if isinstance(cond, A.UnaryOp) and cond.op == "!" and not else_ and _is_revert(then):
            send = self.as_ether_call(cond.operand, checked=True)
            if send is not None:
                return send
        return A.If(self.plain(cond), then, else_, self.loc(t))

    def parse_for(self) -> A.Loop:
        t = self.expect("for")
        self.expect("(")
        init = None
        if not self.accept(";"):
            if self.is_type_start():
                init = self.parse_decl()
            else:
                init = self.parse_expr_stmt()
        cond = None
        if not self.at(";"):
            cond = self.plain(self.parse_expr())
        self.expect(";")
        step = None
        if not self.at(")"):
            step = self.parse_simple_stmt(terminator=")")
        self.expect(")")
        body = self.parse_body()
        return A.Loop(init, cond, step, body, self.loc(t))

    def parse_expr_stmt(self):
        s = self.parse_simple_stmt(terminator=";")
        self.expect(";")
        return s

    def parse_simple_stmt(self, terminator):
        t = self.tok
        loc = self.loc(t)
        e = self.parse_expr()
        op = self.tok.text if self.tok.kind == "op" else None
        if op in ASSIGN_OPS:
            self.next()
            rhs = self.parse_expr()
            if isinstance(rhs, _New):
                if not self.in_constructor:
                    self.unsupported("dynamic contract creation outside the constructor", t)
                if rhs.name not in self.contract_names:
                    self.unsupported(f"creation of unknown contract '{rhs.name}'", t)
                self.created.append(rhs.name)
                # contract references are compile-time constants in the model
                return _NoOp(loc)
            lhs = self.lvalue(self.plain(e), t)
            rhs = self.plain(rhs)
            if ASSIGN_OPS[op] is not None:
                rhs = A.BinOp(ASSIGN_OPS[op], lhs, rhs, loc)
            return A.Assign(lhs, rhs, loc)
        if op in ("++", "--"):
            self.next()
            lhs = self.lvalue(self.plain(e), t)
            return A.Assign(lhs, A.BinOp("+" if op == "++" else "-", lhs,
                                         A.Num(1, loc), loc), loc)
        if isinstance(e, A.UnaryOp) and e.op in ("++", "--"):
            lhs = self.lvalue(e.operand, t)
            return A.Assign(lhs, A.BinOp("+" if e.op == "++" else "-", lhs,
                                         A.Num(1, loc), loc), loc)
        call = self.as_call_stmt(e, t)
        if call is None:
            self.error("expression statement has no effect", t)
        return call

    def lvalue(self, e, t):
        if isinstance(e, (A.Ident, A.Index)):
            if isinstance(e, A.Index) and A.index_root(e) is None:
                self.error("invalid assignment target", t)
            return e
        if isinstance(e, (A.MsgSender, A.BlockTimestamp, A.Balance, A.This)):
            self.error("built-in variables cannot be assigned", t)
        self.error("invalid assignment target", t)

    def as_ether_call(self, e, checked):
        if not isinstance(e, _Call):
            return None
        callee = e.callee
        if isinstance(callee, _Member) and callee.name in ("send", "transfer") and not e.opts:
            if len(e.args) != 1:
                return None  # a contract method that happens to share the name
            rcpt, amt = self.plain(callee.base), self.plain(e.args[0])
            if callee.name == "transfer":
                return A.Transfer(rcpt, amt, e.loc)
            return A.Send(rcpt, amt, checked, e.loc)
        # x.call.value(v)()  and  x.call{value: v}("")
        if isinstance(callee, _Call) and isinstance(callee.callee, _Member) \
                and callee.callee.name == "value" and isinstance(callee.callee.base, _Member) \
                and callee.callee.base.name == "call":
            if len(callee.args) != 1:
                self.error("'value' takes one argument")
            if e.args:
                self.unsupported("call data in value calls is not supported")
            return A.CallValue(self.plain(callee.callee.base.base), self.plain(callee.args[0]),
                               checked, e.loc)
        if isinstance(callee, _Member) and callee.name == "call" and e.opts:
            opts = dict(e.opts)
            if set(opts) != {"value"}:
                self.unsupported("call options other than value are not supported")
            if e.args not in ((), ("",)):
                self.unsupported("call data in value calls is not supported")
            return A.CallValue(self.plain(callee.base), self.plain(opts["value"]), checked, e.loc)
        return None

    def as_call_stmt(self, e, t):
        ether = self.as_ether_call(e, checked=False)
        if ether is not None:
            return ether
        if not isinstance(e, _Call):
            return None
        callee = e.callee
        if isinstance(callee, _Member):
            base = callee.base
            args = tuple(self.plain(a) for a in e.args)
            if callee.name in ("call", "delegatecall", "staticcall", "callcode"):
                self.unsupported(f"low-level '{callee.name}' to unknown code is not supported", t)
            if isinstance(base, _Call) and isinstance(base.callee, A.Ident) and len(base.args) == 1:
                return A.InternalCall(base.callee.name, callee.name, args, None, e.loc)
            if isinstance(base, A.Ident):
                # resolved against declared contract-typed variables later
                return A.InternalCall("", callee.name, args, base.name, e.loc)
            self.unsupported("external call to unknown code is not supported", t)
        if isinstance(callee, A.Ident):
            self.unsupported(f"calls to contract-local function '{callee.name}' are not supported", t)
        self.unsupported("unsupported call expression", t)

    def plain(self, e):
        """Reject call-shaped leftovers inside ordinary expressions."""
        if isinstance(e, (_Call, _Member)):
            loc = e.loc
            raise UnsupportedFeature("call results cannot be used as values", loc.line, loc.col)
        if isinstance(e, _New):
            raise UnsupportedFeature("dynamic contract creation is not supported",
                                     e.loc.line, e.loc.col)
        if isinstance(e, A.BinOp):
            return replace(e, left=self.plain(e.left), right=self.plain(e.right))
        if isinstance(e, A.UnaryOp):
            if e.op in ("++", "--"):
                raise UnsupportedFeature("increment inside an expression is not supported",
                                         e.loc.line, e.loc.col)
            return replace(e, operand=self.plain(e.operand))
        if isinstance(e, A.Index):
            return replace(e, base=self.plain(e.base), key=self.plain(e.key))
        if isinstance(e, A.Balance):
            return replace(e, account=self.plain(e.account))
        return e

    # ------------------------------------------------------------ expressions
    def parse_expr(self):
        e = self.parse_binary(0)
        if self.at("?"):
            self.unsupported("conditional expressions are not supported")
        return e

    _LEVELS = [("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="),
               ("|",), ("^",), ("&",), ("<<", ">>"), ("+", "-"), ("*", "/", "%")]

    def parse_binary(self, level):
        if level == len(self._LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in self._LEVELS[level]:
            t = self.next()
            if t.text in ("|", "^", "&", "<<", ">>"):
                self.unsupported(f"bitwise operator '{t.text}' is not supported", t)
            right = self.parse_binary(level + 1)
            left = A.BinOp(t.text, left, right, self.loc(t))
        return left

    def parse_unary(self):
        t = self.tok
        if t.kind == "op" and t.text in ("!", "-"):
            self.next()
            operand = self.parse_unary()
            if t.text == "-" and isinstance(operand, A.Num):
                self.unsupported("negative literals are not supported", t)
            return A.UnaryOp(t.text, operand, self.loc(t))
        if t.kind == "op" and t.text in ("++", "--"):
            self.next()
            return A.UnaryOp(t.text, self.parse_unary(), self.loc(t))
        if t.kind == "op" and t.text == "~":
            self.unsupported("bitwise operator '~' is not supported", t)
        return self.parse_power()

    def parse_power(self):
        base = self.parse_postfix()
        if self.at("**"):
            t = self.next()
            exp = self.parse_unary()  # right associative
            return A.BinOp("**", base, exp, self.loc(t))
        return base

    def parse_postfix(self):
        e = self.parse_primary()
        while True:
            t = self.tok
            if self.at("."):
                self.next()
                name_tok = self.tok
                if name_tok.kind not in ("id", "kw"):
                    self.error("expected member name")
                self.next()
                e = self.member(e, name_tok)
            elif self.at("["):
                self.next()
                key = self.plain(self.parse_expr())
                self.expect("]")
                e = A.Index(self.plain(e), key, self.loc(t))
            elif self.at("("):
                args = self.parse_args()
                e = self.call(e, args, (), t)
            elif self.at("{") and isinstance(e, _Member):
                self.next()
                opts = []
                while not self.at("}"):
                    k = self.expect_ident().text
                    self.expect(":")
                    opts.append((k, self.parse_expr()))
                    if not self.accept(","):
                        break
                self.expect("}")
                args = self.parse_args()
                e = _Call(e, args, tuple(opts), self.loc(t))
            else:
                return e

    def parse_args(self):
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                if self.tok.kind == "str":
                    args.append(self.next().value)
                else:
                    args.append(self.parse_expr())
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(args)

    def member(self, base, name_tok):
        name = name_tok.text
        loc = self.loc(name_tok)
        if isinstance(base, _Builtin):
            if base.name == "msg":
                if name == "sender":
                    return A.MsgSender(base.loc)
                self.unsupported(f"'msg.{name}' is not supported", name_tok)
            if base.name == "block":
                if name == "timestamp":
                    return A.BlockTimestamp(base.loc)
                self.unsupported(f"'block.{name}' is not supported", name_tok)
        if name == "balance" and not isinstance(base, (_Call, _Member)):
            return A.Balance(self.plain(base), loc)
        return _Member(base, name, loc)

    def call(self, callee, args, opts, t):
        loc = self.loc(t)
        if isinstance(callee, _Builtin) and callee.name in ("address", "payable"):
            if len(args) != 1:
                self.error("cast takes one argument", t)
            a = args[0]
            if isinstance(a, A.Num):
                return A.AddressLit(hex(a.value), loc)
            return self.plain(a)
        if isinstance(callee, A.Ident) and (_UINT_RE.match(callee.name)):
            if len(args) != 1:
                self.error("cast takes one argument", t)
            return self.plain(args[0])
        return _Call(callee, args, opts, loc)

    def parse_primary(self):
        t = self.tok
        loc = self.loc(t)
        if t.kind == "num":
            self.next()
            value = t.value
            unit = self.tok.text
            if self.tok.kind == "id" and unit in ETHER_UNITS:
                self.next()
                value *= ETHER_UNITS[unit]
            elif self.tok.kind == "id" and unit in TIME_UNITS:
                self.next()
                value *= TIME_UNITS[unit]
            elif self.tok.kind == "kw" and unit == "ether":
                self.next()
                value *= ETHER_UNITS["ether"]
            if t.text.lower().startswith("0x") and len(t.text) == 42:
                return A.AddressLit(hex(value), loc)
            return A.Num(value, loc)
        if t.kind == "str":
            self.unsupported("string literals are not supported", t)
        if t.text in ("true", "false") and t.kind == "kw":
            self.next()
            return A.BoolLit(t.text == "true", loc)
        if t.text == "(" and t.kind == "op":
            self.next()
            e = self.parse_expr()
            if self.at(","):
                self.unsupported("tuple expressions are not supported")
            self.expect(")")
            return e
        if t.kind == "kw":
            if t.text in ("msg", "block"):
                self.next()
                return _Builtin(t.text, loc)
            if t.text == "now":
                self.next()
                return A.BlockTimestamp(loc)
            if t.text == "this":
                self.next()
                return A.This(loc)
            if t.text in ("address", "payable"):
                self.next()
                return _Builtin(t.text, loc)
            if t.text == "new":
                self.next()
                name = self.expect_ident().text
                self.parse_args()
                return _New(name, loc)
        if t.kind == "id":
            self.next()
            if t.text in ("tx", "gasleft", "keccak256", "sha3", "sha256", "ecrecover",
                          "selfdestruct", "suicide", "blockhash"):
                self.unsupported(f"'{t.text}' is not supported", t)
            return A.Ident(t.text, loc)
        self.error(f"unexpected {self.describe(t)}")


@dataclass(frozen=True)
class _Builtin:
    name: str
    loc: A.Loc


@dataclass(frozen=True)
class _NoOp:
    loc: A.Loc


def with_trailing_return(body: tuple) -> tuple:
    """Make every path end in a return so the translator's return rules fire."""
    if body and isinstance(body[-1], A.Return):
        return body
    return body + (A.Return(None),)


def _is_revert(stmts) -> bool:
    return (len(stmts) == 1 and isinstance(stmts[0], A.Require)
            and isinstance(stmts[0].cond, A.BoolLit) and not stmts[0].cond.value)


def _resolve_refs(contract: A.ContractAst, contract_names: set) -> A.ContractAst:
    """Resolve `ref.f(...)` calls through contract-typed variables and drop no-ops."""
    ref_types = {g.name: g.ty.name for g in contract.globals if isinstance(g.ty, A.ContractRef)}
    for g in contract.globals:
        if isinstance(g.ty, A.ContractRef) and g.ty.name not in contract_names:
            raise UnsupportedFeature(f"unknown type '{g.ty.name}'", g.loc.line, g.loc.col)

    def fix(stmts, scope):
        out = []
        for s in stmts:
            if isinstance(s, _NoOp):
                continue
            if isinstance(s, A.Declare) and isinstance(s.ty, A.ContractRef):
                if s.ty.name not in contract_names:
                    raise UnsupportedFeature(f"unknown type '{s.ty.name}'", s.loc.line, s.loc.col)
                scope = {**scope, s.name: s.ty.name}
            if isinstance(s, A.InternalCall) and not s.target_contract:
                target = scope.get(s.via)
                if target is None:
                    raise UnsupportedFeature(
                        f"external call through '{s.via}' to unknown code is not supported",
                        s.loc.line, s.loc.col)
                s = replace(s, target_contract=target)
            if isinstance(s, A.If):
                s = replace(s, then=fix(s.then, scope), else_=fix(s.else_, scope))
            elif isinstance(s, A.Loop):
                s = replace(s, body=fix(s.body, scope))
            out.append(s)
        return tuple(out)

    fns = tuple(replace(f, body=fix(f.body, dict(ref_types))) for f in contract.functions)
    return replace(contract, functions=fns)


def parse_source(source: str) -> list:
    """Parse every contract in a source file."""
    return Parser(source).parse_source()


def parse_contract(source: str, name: str | None = None) -> A.ContractAst:
    """Parse `source` and return the named contract (default: the last one)."""
    contracts = parse_source(source)
    if name is None:
        return contracts[-1]
    for c in contracts:
        if c.name == name:
            return c
    raise SolSyntaxError(f"no contract named '{name}'", 1, 1)
