"""Search, solve and refine until a counterexample is confirmed or the bound is exhausted."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from ..msr.facts import AnyOf
from .config import SearchConfig
from .constraints import ConstraintSet, collect_constraints
from .search import BlockingClause, Searcher, SearchTimeout
from .solver import solve
from .solver.linear import solve_linear
from .witness import check_witness

VALID, VIOLATED, UNKNOWN = "Valid", "Violated", "Unknown"


@dataclass
class Verdict:
    status: str
    prop_name: str = ""
    trace: Optional[object] = None
    witness: Optional[dict] = None
    constraints: Optional[ConstraintSet] = None
    reason: str = ""
    bounds: dict = field(default_factory=dict)
    complete: bool = False   # no branch was cut by the depth bound
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED


def _feasibility(cfg: SearchConfig, deadline):
    domain = cfg.value_domain or (0, 2 ** 256 - 1)

    def feasible(cons):
        conj = [c for c in cons if not isinstance(c, AnyOf)]
        disj = [c.options for c in cons if isinstance(c, AnyOf)]
        r = solve_linear(conj, disj, domain, node_limit=500, deadline=deadline)
        return False if r.status == "unsat" else True
    return feasible


def verify(model, cfg: SearchConfig | None = None) -> Verdict:
    cfg = cfg or SearchConfig()
    t0 = time.monotonic()
    deadline = t0 + cfg.timeout
    blocked: set = set()
    feasible = _feasibility(cfg, deadline) if cfg.prune_infeasible else None
    searcher = Searcher(model, cfg, blocked, deadline, feasible)
    prop = getattr(getattr(model, "property", None), "name", "")
    unknown = []

    def done(status, **kw):
        st = searcher.stats
        stats = {"nodes": st.nodes, "traces": st.traces, "blocked": len(blocked),
                 "pruned_infeasible": st.pruned_infeasible, "iterations": st.iterations}
        return Verdict(status, prop, bounds=cfg.bounds(), stats=stats,
                       seconds=time.monotonic() - t0, complete=st.complete, **kw)

    try:
        for trace, sig in searcher.traces():
            cs = collect_constraints(trace, cfg.value_domain)
            r = solve(cs, cfg, deadline)
            if r.sat:
                if check_witness(trace, r.model, cs.domain):
                    return done(VIOLATED, trace=trace, witness=r.model, constraints=cs)
                unknown.append("witness failed concrete re-execution")
            elif r.status == "unknown":
                unknown.append(r.reason or "solver returned unknown")
            blocked.add(BlockingClause(sig))
            if time.monotonic() > deadline:
                raise SearchTimeout()
    except SearchTimeout:
        return done(UNKNOWN, reason="timeout")
    if unknown:
        return done(UNKNOWN, reason="solver-unknown: " + unknown[0])
    return done(VALID)
