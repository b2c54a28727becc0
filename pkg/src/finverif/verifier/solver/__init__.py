"""Constraint solving front door: builtin linear solver or an external SMT-LIB2 process."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .linear import LinearResult, Nonlinear, solve_linear
from .smtlib import emit, parse_model, solve_smtlib, symbol_names

SMALL_VALUES = 1000


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def sat(self) -> bool:
        return self.status == "sat"


def solve(cs, cfg=None, deadline=None) -> SolveResult:
    """Solve a ConstraintSet; a returned model is re-checked by evaluation."""
    solver = getattr(cfg, "solver", "builtin")
    node_limit = getattr(cfg, "solver_node_limit", 20000)
    if solver.startswith("smtlib:"):
        remaining = 60.0 if deadline is None else max(1.0, deadline - time.monotonic())
        r = solve_smtlib(cs, solver.split(":", 1)[1], timeout=remaining)
    else:
        free = getattr(cs, "free_symbols", ())
        r = solve_linear(cs.conjuncts(), cs.disjunctions, cs.domain, node_limit, deadline, free)
        lo, hi = cs.domain
        if r.status == "sat" and hi > SMALL_VALUES:
            # prefer a readable witness when one exists with small values
            small = solve_linear(cs.conjuncts(), cs.disjunctions, (lo, max(lo, SMALL_VALUES)),
                                 node_limit, deadline, free)
            if small.status == "sat":
                r = small
    if r.status == "sat":
        model = {s: r.model.get(s, 0) for s in cs.symbols}
        if not cs.satisfied_by(model):
            return SolveResult("unknown", reason="solver model failed re-evaluation")
        return SolveResult("sat", model)
    return SolveResult(r.status, reason=r.reason)


__all__ = ["SolveResult", "solve", "solve_linear", "solve_smtlib", "emit", "parse_model",
           "symbol_names", "LinearResult", "Nonlinear"]
