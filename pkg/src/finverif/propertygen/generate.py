"""Contract classification, key-variable recognition and property synthesis."""
from __future__ import annotations

import re

from ..frontend import ast as A
from ..frontend.errors import SolSyntaxError
from ..frontend.parser import Parser
from ..frontend.pretty import expr_str as pretty_expr
from .properties import (ContractCategory, Equivalence, IndexTerm, Invariant, KeyVariables,
                         NoPropertyApplicable)
from .similarity import name_similarity

DEFAULT_THRESHOLD = 85
BALANCE_NAMES = ("balances", "ownedTokenCount")
SUPPLY_NAME = "totalSupply"

Cat = ContractCategory


def is_balance_map(ty) -> bool:
    return (isinstance(ty, A.Mapping) and isinstance(ty.key, A.Address)
            and isinstance(ty.val, A.UInt))


def is_ether_related(ast: A.ContractAst) -> bool:
    """Sends ether (transfer/send/call.value) or receives it (payable)."""
    for fn in ast.functions:
        if fn.payable:
            return True
        for s in A.walk_stmts(fn.body):
            if isinstance(s, (A.Transfer, A.Send, A.CallValue)):
                return True
    return False


def find_key_variables(ast: A.ContractAst, threshold: float = DEFAULT_THRESHOLD,
                       overrides=None) -> KeyVariables:
    candidates = [g for g in ast.state_globals if is_balance_map(g.ty)]
    if overrides:
        known = {g.name for g in ast.globals}
        names = tuple(n for n in overrides if n in known)
    else:
        names = tuple(g.name for g in candidates
                      if max(name_similarity(g.name, b) for b in BALANCE_NAMES) > threshold)
    supply = None
    best = threshold
    for g in ast.state_globals:
        if isinstance(g.ty, A.UInt):
            score = name_similarity(g.name, SUPPLY_NAME)
            if score > best:
                supply, best = g.name, score
    return KeyVariables(names, supply, tuple(overrides) if overrides else None)


def _referenced_contracts(ast: A.ContractAst) -> set:
    out = {g.ty.name for g in ast.globals if isinstance(g.ty, A.ContractRef)}
    out |= set(ast.created_contracts)
    for fn in ast.functions:
        for s in A.walk_stmts(fn.body):
            if isinstance(s, A.InternalCall):
                out.add(s.target_contract)
            elif isinstance(s, A.Declare) and isinstance(s.ty, A.ContractRef):
                out.add(s.ty.name)
    out.discard(ast.name)
    return out


def classify_unit(asts, threshold: float = DEFAULT_THRESHOLD, overrides=None) -> dict:
    """Categories of every contract in one source unit, keyed by name."""
    direct = {}
    for c in asts:
        cats = set()
        if is_ether_related(c):
            cats.add(Cat.ETHER_RELATED)
        if find_key_variables(c, threshold, overrides).balances_vars:
            cats.add(Cat.TOKEN_CONTRACT)
        direct[c.name] = cats
    for c in asts:
        if any(Cat.TOKEN_CONTRACT in direct.get(n, ()) for n in c.created_contracts):
            direct[c.name].add(Cat.TOKEN_MANAGING)
    out = {}
    for c in asts:
        cats = set(direct[c.name])
        if not cats:
            users = [u for u in asts if c.name in _referenced_contracts(u)]
            if any(direct[u.name] for u in users):
                cats.add(Cat.INDIRECT_RELATED)
        out[c.name] = cats or {Cat.OTHER}
    return out


def classify(ast: A.ContractAst, unit=None, threshold: float = DEFAULT_THRESHOLD,
             overrides=None) -> set:
    unit = list(unit) if unit else [ast]
    if all(c.name != ast.name for c in unit):
        unit.append(ast)
    return classify_unit(unit, threshold, overrides)[ast.name]


def written_index_terms(ast: A.ContractAst, var: str) -> list:
    """`var[k]` targets of assignments, per function, in source order."""
    out = []
    for fn in ast.entry_functions:
        seen = set()
        for s in A.walk_stmts(fn.body):
            if isinstance(s, A.Assign) and isinstance(s.lhs, A.Index) \
                    and A.index_root(s.lhs) == var:
                text = pretty_expr(s.lhs)
                if text not in seen:
                    seen.add(text)
                    out.append(IndexTerm(ast.name, fn.name, tuple(A.index_keys(s.lhs)), text))
    return out


def generate_properties(ast: A.ContractAst, kv: KeyVariables, categories: set,
                        unit=None, custom=None) -> list:
    """Invariants per balance variable plus one equivalence property."""
    cats = set(categories)
    if cats <= {Cat.OTHER, Cat.INDIRECT_RELATED} and not kv.user_overrides and not custom:
        raise NoPropertyApplicable(f"{ast.name}: no ether or token behaviour recognized")
    props: list = []
    if custom is not None:
        props.append(custom)
    else:
        for var in kv.balances_vars:
            terms = written_index_terms(ast, var)
            if terms:
                props.append(Invariant(ast.name, var, tuple(terms), kv.total_supply))
    token_vars = [(ast.name, v) for v in kv.balances_vars]
    if Cat.TOKEN_MANAGING in cats and unit:
        by_name = {c.name: c for c in unit}
        for n in ast.created_contracts:
            if n in by_name:
                sub = find_key_variables(by_name[n])
                token_vars.extend((n, v) for v in sub.balances_vars)
    ether = Cat.ETHER_RELATED in cats
    if ether or token_vars:
        props.append(Equivalence(ast.name, tuple(token_vars), ether))
    if not props:
        raise NoPropertyApplicable(f"{ast.name}: no property could be generated")
    return props


_CUSTOM = re.compile(r"^\s*sum\s*\((?P<terms>.*)\)\s*==\s*(?P<rhs>\S+)\s*$", re.S)


def _split_args(text: str) -> list:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def parse_custom_invariant(text: str, ast: A.ContractAst) -> Invariant:
    """`sum(var[i1], var[i2], ...) == <integer>|<total-supply global>`."""
    m = _CUSTOM.match(text)
    if not m:
        raise ValueError(f"custom invariant must look like 'sum(m[a], m[b]) == C': {text!r}")
    terms, var = [], None
    for part in _split_args(m.group("terms")):
        try:
            e = Parser(part).parse_expr()
        except SolSyntaxError as exc:
            raise ValueError(f"bad index term {part!r}: {exc}") from None
        if not isinstance(e, A.Index) or A.index_root(e) is None:
            raise ValueError(f"index term expected, got {part!r}")
        root = A.index_root(e)
        if var not in (None, root):
            raise ValueError("all terms of a custom invariant must index the same mapping")
        var = root
        terms.append(IndexTerm(ast.name, "*", tuple(A.index_keys(e)), pretty_expr(e)))
    if var is None:
        raise ValueError("custom invariant has no terms")
    decl = ast.global_decl(var)
    if decl is None or not is_balance_map(decl.ty):
        raise ValueError(f"'{var}' is not a mapping(address => uint) global of {ast.name}")
    rhs = m.group("rhs")
    if rhs.isdigit():
        return Invariant(ast.name, var, tuple(terms), None, int(rhs), custom=True)
    g = ast.global_decl(rhs)
    if g is None or not isinstance(g.ty, A.UInt):
        raise ValueError(f"right-hand side must be an integer or a uint global: {rhs!r}")
    return Invariant(ast.name, var, tuple(terms), rhs, custom=True)
