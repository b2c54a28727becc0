"""Ground states, rule application and applicable-instance enumeration."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .facts import Fact
from .rules import FR, Rule
from .terms import Const, Fresh, MapVal, Sort, SortMismatch, Term, Var, is_ground


class NotApplicable(Exception):
    pass


class State:
    """Multiset of ground facts with a canonical (sorted) encoding."""
    __slots__ = ("counts", "_canon", "_by_name", "_hash")

    def __init__(self, facts: Iterable[Fact] = (), counts: Optional[Counter] = None):
        if counts is None:
            counts = Counter(facts)
        self.counts = counts
        self._canon = None
        self._by_name = None
        self._hash = None

    @property
    def canon(self) -> tuple:
        if self._canon is None:
            self._canon = tuple(sorted((f.key, n) for f, n in self.counts.items()))
        return self._canon

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.canon)
        return self._hash

    def __eq__(self, other):
        return isinstance(other, State) and self.counts == other.counts

    def __len__(self):
        return sum(self.counts.values())

    def __iter__(self):
        for f, n in sorted(self.counts.items(), key=lambda kv: kv[0].key):
            for _ in range(n):
                yield f

    def __repr__(self):
        return "{" + ", ".join(repr(f) for f in self) + "}"

    def by_name(self, name: str) -> list:
        if self._by_name is None:
            idx: dict = {}
            for f in self.counts:
                idx.setdefault(f.name, []).append(f)
            self._by_name = idx
        return self._by_name.get(name, [])

    def contains(self, facts: Iterable[Fact]) -> bool:
        need = Counter(facts)
        return all(self.counts.get(f, 0) >= n for f, n in need.items())

    def replace(self, remove: Iterable[Fact], add: Iterable[Fact]) -> "State":
        c = Counter(self.counts)
        for f in remove:
            n = c.get(f, 0)
            if n <= 0:
                raise NotApplicable(f"missing {f!r}")
            if n == 1:
                del c[f]
            else:
                c[f] = n - 1
        for f in add:
            c[f] += 1
        return State(counts=c)


EMPTY = State()


def _check_sorts(rule: Rule, subst: dict):
    for v in rule.vars():
        if v not in subst:
            raise ValueError(f"{rule.name}: substitution does not bind {v.name}")
        t = subst[v]
        if t.sort != v.sort:
            raise SortMismatch(f"{rule.name}: {v.name} has sort {v.sort.value}, "
                               f"bound to {t!r} of sort {t.sort.value}")
        if not is_ground(t):
            raise ValueError(f"{rule.name}: {v.name} bound to non-ground {t!r}")


def instantiate(rule: Rule, subst: dict):
    prem = [f.subst(subst) for f in rule.premise]
    acts = [a.subst(subst) for a in rule.actions]
    concl = [f.subst(subst) for f in rule.conclusion]
    return prem, acts, concl


def apply_rule(state: State, rule: Rule, subst: dict) -> State:
    """(state minus lσ) plus rσ; raises NotApplicable unless lσ is a sub-multiset."""
    _check_sorts(rule, subst)
    prem, _, concl = instantiate(rule, subst)
    if not state.contains(prem):
        raise NotApplicable(rule.name)
    return state.replace(prem, concl)


# ------------------------------------------------------------------ matching

def match_term(pat: Term, t: Term, sigma: dict) -> Optional[dict]:
    if isinstance(pat, Var):
        if pat.sort != t.sort:
            return None
        bound = sigma.get(pat)
        if bound is None:
            s = dict(sigma)
            s[pat] = t
            return s
        return sigma if bound == t else None
    return sigma if pat == t else None


def match_fact(pat: Fact, f: Fact, sigma: dict) -> Optional[dict]:
    if pat.name != f.name or len(pat.args) != len(f.args) or pat.tag != f.tag:
        return None
    for p, t in zip(pat.args, f.args):
        sigma = match_term(p, t, sigma)
        if sigma is None:
            return None
    return sigma


def match_premises(state: State, pats: list, sigma: dict | None = None) -> list:
    """All substitutions placing the patterns onto distinct fact occurrences of state."""
    out = []
    used: Counter = Counter()

    def go(k, s):
        if k == len(pats):
            out.append(s)
            return
        pat = pats[k]
        for f in state.by_name(pat.name):
            if used[f] >= state.counts[f]:
                continue
            s2 = match_fact(pat, f, s)
            if s2 is None:
                continue
            used[f] += 1
            go(k + 1, s2)
            used[f] -= 1
    go(0, dict(sigma or {}))
    return out


_FRESH_COUNTER = itertools.count(1)


def _default_fresh():
    def fresh(v: Var) -> Term:
        n = next(_FRESH_COUNTER)
        f = Fresh(f"{v.name}.{n}", v.sort)
        return MapVal(f) if v.sort == Sort.MAP else f
    return fresh


def atoms_of(state: State, sort: Sort = Sort.ADDR) -> list:
    out = set()

    def visit(t):
        if isinstance(t, Const) and t.sort == sort:
            out.add(t)
        for x in getattr(t, "args", ()) or ():
            if isinstance(x, Term):
                visit(x)
        if isinstance(t, MapVal):
            for ks, v in t.entries:
                for k in ks:
                    visit(k)
                visit(v)
    for f in state.counts:
        for a in f.args:
            visit(a)
    return sorted(out)


def enumerate_applicable(state: State, rules: list, *, universe: Optional[dict] = None,
                         fresh: Optional[Callable] = None,
                         new_atom: Optional[Callable] = None) -> list:
    """Every (rule, substitution) instance applicable in `state`.

    Premise variables bind by matching; variables bound by Fr premises get new
    fresh values (the Fresh rule fires implicitly); remaining variables of sort
    Addr/FnName/Tag are enumerated over `universe` (sort -> list of constants,
    or a callable `(rule, var) -> list`).  Num values stay symbolic.
    `new_atom(k)` may supply the k-th not-yet-used atom for an Addr variable.
    """
    fresh = fresh or _default_fresh()
    out = []
    for rule in rules:
        matched = rule.matched_premise
        for sigma in match_premises(state, matched):
            for v in rule.fresh_vars:
                sigma[v] = fresh(v)
            free = [v for v in rule.unbound_vars() if v not in sigma]
            for s in _enumerate_free(rule, free, sigma, state, universe, new_atom):
                out.append((rule, s))
    return out


def _enumerate_free(rule, free, sigma, state, universe, new_atom):
    if not free:
        yield sigma
        return

    def base_domain(v):
        if callable(universe):
            return list(universe(rule, v))
        if universe is not None:
            return list(universe.get(v.sort, []))
        return atoms_of(state, v.sort)

    def go(k, s, used_new):
        if k == len(free):
            yield s
            return
        v = free[k]
        if v.sort in (Sort.NUM, Sort.MAP):
            raise ValueError(f"{rule.name}: numeric variable {v.name} is not bound")
        dom = base_domain(v)
        # atoms introduced earlier in this same instance are reusable
        dom += [t for t in s.values() if isinstance(t, Const) and t.sort == v.sort
                and t not in dom and _is_new(t, rule, v, new_atom, used_new)]
        for c in dom:
            s2 = dict(s)
            s2[v] = c
            yield from go(k + 1, s2, used_new)
        if new_atom is not None and v.sort == Sort.ADDR:
            extra = new_atom(rule, v, used_new)
            if extra is not None:
                s2 = dict(s)
                s2[v] = extra
                yield from go(k + 1, s2, used_new + 1)
    yield from go(0, sigma, 0)


def _is_new(t, rule, v, new_atom, used_new):
    if new_atom is None:
        return False
    return any(new_atom(rule, v, j) == t for j in range(used_new))


# ------------------------------------------------------------------ executions

@dataclass
class Step:
    rule: str
    subst: dict
    state: State
    actions: tuple = ()
    rule_ref: Optional[Rule] = None


@dataclass
class Execution:
    initial: State = field(default_factory=State)
    steps: list = field(default_factory=list)

    @property
    def final(self) -> State:
        return self.steps[-1].state if self.steps else self.initial

    def labels(self) -> list:
        return [s.actions for s in self.steps]

    def rule_names(self) -> list:
        return [s.rule for s in self.steps]

    def fresh_names(self) -> list:
        out = []
        for s in self.steps:
            if s.rule == "Fresh":
                out.extend(s.subst.values())
        return out


def fire(execution_state: State, rule: Rule, subst: dict) -> list:
    """Macro step: the Fresh rule for each Fr premise, then the rule itself.

    Returns the list of Steps appended to an execution.
    """
    steps = []
    st = execution_state
    for pat in rule.premise:
        if pat.name == FR:
            n = subst[pat.args[0]]
            fact = Fact(FR, (n,))
            st = st.replace((), (fact,))
            steps.append(Step("Fresh", {pat.args[0]: n}, st))
    _, acts, _ = instantiate(rule, subst)
    st = apply_rule(st, rule, subst)
    steps.append(Step(rule.name, dict(subst), st, tuple(acts), rule))
    return steps
