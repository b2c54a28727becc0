"""Ordering constraints on the block timestamps read by each copy."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..msr.facts import NumConstraint
from ..msr.terms import app, num

MINER_DRIFT = 15


@dataclass
class TimestampConstraintSet:
    symbols_a: list = field(default_factory=list)
    symbols_b: list = field(default_factory=list)
    constraints: list = field(default_factory=list)

    def __bool__(self):
        return bool(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)


def _consumed_bvars(trace, side: str) -> list:
    out = []
    for step in trace.steps:
        rule = step.rule_ref
        if rule is None:
            continue
        for f in rule.premise:
            if f.name == f"Bvar_{side}":
                out.append(step.subst[f.args[0]])
    return out


def index_timestamps(trace) -> TimestampConstraintSet:
    """bt_X0, bt_X1, ... in consumption order; strictly increasing per copy, and
    copy B's i-th timestamp at most 15 seconds after copy A's."""
    a, b = _consumed_bvars(trace, "A"), _consumed_bvars(trace, "B")
    cs = []
    for seq in (a, b):
        for prev, cur in zip(seq, seq[1:]):
            cs.append(NumConstraint("lt", prev, cur))
    for ta, tb in zip(a, b):
        cs.append(NumConstraint("le", tb, app("sum", ta, num(MINER_DRIFT))))
    return TimestampConstraintSet(a, b, cs)
