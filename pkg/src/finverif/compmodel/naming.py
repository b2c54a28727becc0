"""Fact naming for the A/B copies and in-flight fact classification."""
from __future__ import annotations

from ..msr.facts import Fact

# facts that only exist while a transaction is executing
_INFLIGHT = ("Fallback", "FbWait", "Return", "ReturnFallback")


def side_name(name: str, side: str) -> str:
    """Name of fact `name` in copy `side` ("A"/"B"); Fr and labels-only names stay."""
    if not side or name == "Fr":
        return name
    if name.startswith("Var_"):
        return f"Var_{side}{name[4:]}"
    if name == "Call_e":
        return f"Call_{side}e"
    if name == "Call_in":
        return f"Call_{side}in"
    return f"{name}_{side}"


def strip_side(name: str, side: str) -> str:
    if not side:
        return name
    if name.startswith(f"Var_{side}"):
        return "Var_" + name[5:]
    if name == f"Call_{side}e":
        return "Call_e"
    if name == f"Call_{side}in":
        return "Call_in"
    if name.endswith("_" + side):
        return name[:-2]
    return name


def rename_fact(f: Fact, side: str) -> Fact:
    return Fact(side_name(f.name, side), f.args, f.tag)


def is_inflight(name: str, side: str = "") -> bool:
    """True for facts of `side` that belong to an unfinished transaction."""
    if side:
        if name.startswith(f"Var_{side}") or name == f"Call_{side}in":
            return True
        return any(name == f"{n}_{side}" for n in _INFLIGHT)
    return name.startswith("Var_") or name == "Call_in" or name in _INFLIGHT
