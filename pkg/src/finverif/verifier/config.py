"""Search and solver configuration."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class SearchConfig:
    max_depth: int = 120         # rule applications per trace
    tx_bound: int = 2            # external transactions (per copy in the equivalence model)
    call_depth_cap: int = 2      # nesting depth of internal calls
    timeout: float = 300.0       # seconds per property
    solver: str = "builtin"      # or "smtlib:<path to solver binary>"
    user_cap: int = 2            # distinct external user accounts besides c_adv
    value_domain: Optional[tuple] = None  # (lo, hi) bounds for every Num symbol
    prune_infeasible: bool = True
    solver_node_limit: int = 20000
    deepening: tuple = field(default=(12, 24, 48))

    def __post_init__(self):
        for name in ("max_depth", "tx_bound", "call_depth_cap", "user_cap",
                     "solver_node_limit"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.value_domain is not None:
            lo, hi = self.value_domain
            if not 0 <= lo <= hi:
                raise ValueError("value_domain must satisfy 0 <= lo <= hi")
        if not (self.solver == "builtin" or self.solver.startswith("smtlib:")):
            raise ValueError(f"unknown solver {self.solver!r}")

    def bounds(self) -> dict:
        return {"max_depth": self.max_depth, "tx_bound": self.tx_bound,
                "call_depth_cap": self.call_depth_cap}

    def depth_schedule(self) -> list:
        steps = [d for d in self.deepening if d < self.max_depth]
        return steps + [self.max_depth]
