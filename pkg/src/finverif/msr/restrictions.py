"""Trace restrictions over action labels."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .facts import Label, PredEq, PredNeq, decide_pred


def _labels(trace_actions, name):
    for acts in trace_actions:
        for a in acts:
            if isinstance(a, Label) and a.name == name:
                yield a


@dataclass(frozen=True)
class OnceLabel:
    """`L(x)@i & L(x)@j => i = j`: each label (per argument tuple) fires at most once."""
    label: str
    per_args: bool = True

    def holds(self, trace_actions) -> bool:
        seen = set()
        for a in _labels(trace_actions, self.label):
            k = a.args if self.per_args else ()
            if k in seen:
                return False
            seen.add(k)
        return True

    prefix_ok = holds


@dataclass(frozen=True)
class PairedLabels:
    """Labels `left` and `right` occur with equal argument multisets."""
    left: str
    right: str

    def holds(self, trace_actions) -> bool:
        a = Counter(x.args for x in _labels(trace_actions, self.left))
        b = Counter(x.args for x in _labels(trace_actions, self.right))
        return a == b

    def prefix_ok(self, trace_actions) -> bool:
        return True


@dataclass(frozen=True)
class PredicatesHold:
    """Every Pred_eq / Pred_neq action is true (decided on ground atoms)."""

    def holds(self, trace_actions) -> bool:
        for acts in trace_actions:
            for a in acts:
                if isinstance(a, (PredEq, PredNeq)) and decide_pred(a) is False:
                    return False
        return True

    prefix_ok = holds


def check_restrictions(execution, restrictions) -> bool:
    acts = execution.labels() if hasattr(execution, "labels") else list(execution)
    return all(r.holds(acts) for r in restrictions)


def init_restrictions(contracts) -> list:
    return [OnceLabel("Init_E"), OnceLabel("Init_G")]
