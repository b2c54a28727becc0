"""Checks that a contract stays inside the analyzable fragment."""
from __future__ import annotations

from . import ast as A
from .errors import Diagnostic


def check_support(contract: A.ContractAst, known_contracts) -> list:
    """Diagnostics for calls or creations that leave the set of known contracts.

    An empty list means every internal call targets a known contract and every
    contract creation (constructors only; the parser rejects the rest) is of a
    known contract.
    """
    known = set(known_contracts)
    diags = []
    for fn in contract.functions:
        for s in A.walk_stmts(fn.body):
            if isinstance(s, A.InternalCall) and s.target_contract not in known:
                diags.append(Diagnostic(
                    s.loc.line, s.loc.col, "error",
                    f"call to '{s.target_contract}.{s.fn}' leaves the analyzed contract set",
                    "unsupported"))
    for name in contract.created_contracts:
        if name not in known:
            diags.append(Diagnostic(contract.loc.line, contract.loc.col, "error",
                                    f"creation of contract '{name}' outside the analyzed set",
                                    "unsupported"))
    return diags
