"""Bounded search for traces of a complementary model that reach End().

Depth-first with iterative deepening over macro steps (Fresh rules folded
into the rule that consumes them).  Traces are explored in a normal form:
rule phases never decrease, external transactions are generated in a fixed
order and run one at a time per copy, new user addresses are introduced in
order.  Numeric constraints are not decided here, except that constraints
that are false syntactically prune a branch and, optionally, infeasible
prefixes are cut with the solver.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from ..compmodel.naming import is_inflight
from ..msr.engine import Execution, State, fire
from ..msr.facts import AnyOf, Label, NumConstraint, NumFact, PredEq, PredNeq, decide_pred
from ..msr.restrictions import OnceLabel, PairedLabels
from ..msr.rules import FR
from ..msr.terms import Const, Fresh, MapVal, Sort, Var, addr, render
from ..translator.translate import C_ADV
from .config import SearchConfig
from .constraints import collect_constraints, trivial

SIDES = ("", "A", "B")
_CALLS = frozenset({"Call_e", "Call_Ae", "Call_Be"})


class SearchTimeout(Exception):
    pass


@dataclass(frozen=True)
class BlockingClause:
    """Signature of an excluded trace: rule sequence plus the bindings chosen."""
    signature: tuple

    def __str__(self):
        return " ; ".join(uid for uid, _ in self.signature)


@dataclass
class SearchStats:
    nodes: int = 0
    traces: int = 0
    pruned_infeasible: int = 0
    depth_cut: bool = False
    complete: bool = False
    iterations: int = 0


@dataclass
class _RuleInfo:
    idx: int
    rule: object
    phase: int
    generator: bool
    matched: list
    fresh: list
    free: list
    domains: dict
    starts_tx: Optional[str]
    once: list
    init_kind: bool


@dataclass
class _Node:
    state: State
    phase: int = 0
    gen_key: tuple = ()
    tx: int = 0
    users: int = 0
    once: frozenset = frozenset()
    actions: tuple = ()
    trail: tuple = ()           # ((info, subst), ...)
    names: frozenset = frozenset()
    constraints: tuple = ()
    paired: tuple = ()

    def key(self):
        return (self.state, frozenset(Counter(self.actions).items()), self.phase,
                self.gen_key, self.tx, self.users, self.paired)


def _side_of(rule) -> str:
    return rule.meta.get("side", "")


class Searcher:
    def __init__(self, model, cfg: SearchConfig, blocked=None, deadline=None,
                 feasible=None):
        self.model = model
        self.cfg = cfg
        self.blocked = blocked if blocked is not None else set()
        self.deadline = deadline
        self.feasible = feasible  # callable(constraints tuple) -> bool | None
        self.stats = SearchStats()
        self.barriers = getattr(model, "barriers", {}) or {}
        self.once = {r.label: r.per_args for r in model.restrictions
                     if isinstance(r, OnceLabel)}
        self.paired = [r for r in model.restrictions if isinstance(r, PairedLabels)]
        indep = getattr(model, "indep", None)
        universe = list(getattr(indep, "address_universe", []) or [])
        self.universe = universe or [C_ADV]
        self.infos = [self._info(i, r) for i, r in enumerate(model.rules)]
        self.always = [ri for ri in self.infos if not ri.matched]
        self.by_trigger: dict = {}
        for ri in self.infos:
            if ri.matched:
                self.by_trigger.setdefault(ri.matched[0].name, []).append(ri)
        self._feasible_memo: dict = {}

    def _info(self, i, r) -> _RuleInfo:
        labels = [a.name for a in r.actions if isinstance(a, Label) and a.name in self.once]
        starts = _side_of(r) if r.meta.get("starts_tx") else None
        kind = r.meta.get("kind", "")
        return _RuleInfo(i, r, r.meta.get("phase", 3), bool(r.meta.get("generator")),
                         r.matched_premise, r.fresh_vars,
                         [v for v in r.unbound_vars()], r.meta.get("addr_domains", {}),
                         starts, labels, kind.startswith("init_"))

    # ------------------------------------------------------------ enumeration

    def _check_time(self):
        self.stats.nodes += 1
        if self.deadline is not None and self.stats.nodes % 64 == 0 \
                and time.monotonic() > self.deadline:
            raise SearchTimeout()

    def _candidates(self, node: _Node):
        seen = set()
        out = list(self.always)
        for name in {f.name for f in node.state.counts}:
            out.extend(self.by_trigger.get(name, ()))
        for ri in sorted(out, key=lambda ri: ri.idx):
            if ri.idx in seen or ri.phase < node.phase:
                continue
            seen.add(ri.idx)
            if ri.generator and node.tx >= self.cfg.tx_bound:
                continue
            yield ri

    def _matches(self, state: State, pats: list):
        used: Counter = Counter()

        def go(k, s):
            if k == len(pats):
                yield s
                return
            pat = pats[k]
            for f in state.by_name(pat.name):
                if used[f] >= state.counts[f]:
                    continue
                s2 = _match_fact(pat, f, s)
                if s2 is None:
                    continue
                used[f] += 1
                yield from go(k + 1, s2)
                used[f] -= 1
        yield from go(0, {})

    def _domain(self, ri: _RuleInfo, v, sigma, node: _Node) -> list:
        users = [addr(f"u{i + 1}") for i in range(node.users)]
        if ri.domains.get(v.name) == "sender":
            base = [C_ADV] + users
        else:
            base = list(self.universe) + users
        near = [t for t in sigma.values() if isinstance(t, Const) and t.sort == v.sort]
        out = []
        for t in near + base:  # aliasing with the instance's own atoms first
            if t not in out and t.sort == v.sort:
                out.append(t)
        return out

    def _choices(self, ri: _RuleInfo, sigma: dict, node: _Node):
        free = ri.free

        def go(k, s, new_users):
            if k == len(free):
                yield s, new_users
                return
            v = free[k]
            if v.sort in (Sort.NUM, Sort.MAP):
                raise ValueError(f"{ri.rule.name}: numeric variable {v.name} is not bound")
            if v.sort != Sort.ADDR:
                raise ValueError(f"{ri.rule.name}: cannot enumerate {v.name}")
            tmp = _Node(node.state, users=node.users + new_users)
            for c in self._domain(ri, v, s, tmp):
                s2 = dict(s)
                s2[v] = c
                yield from go(k + 1, s2, new_users)
            if node.users + new_users < self.cfg.user_cap:
                s2 = dict(s)
                s2[v] = addr(f"u{node.users + new_users + 1}")
                yield from go(k + 1, s2, new_users + 1)
        yield from go(0, sigma, 0)

    def _fresh_name(self, base: str, taken) -> str:
        name, k = base, 0
        while name in taken:
            k += 1
            name = f"{base}_{k}"
        return name

    # ------------------------------------------------------------ firing

    def _fire(self, node: _Node, ri: _RuleInfo, sigma: dict, new_users: int):
        rule = ri.rule
        cfg = self.cfg
        # phase barrier: the previous copy must have finished its transactions
        if ri.phase > node.phase:
            for p, side in self.barriers.items():
                if node.phase < p <= ri.phase and _inflight(node.state, side):
                    return None
        if ri.starts_tx is not None and _inflight(node.state, ri.starts_tx):
            return None
        names = set(node.names)
        for v in ri.fresh:
            base = f"{v.name}0" if ri.init_kind else v.name
            n = self._fresh_name(base, names)
            names.add(n)
            f = Fresh(n, v.sort)
            sigma[v] = MapVal(f) if v.sort == Sort.MAP else f
        gen_key = node.gen_key
        if ri.generator:
            choice = tuple(sorted((v.name, sigma[v].value) for v in ri.free))
            gen_key = (ri.idx, choice)
            if node.gen_key and gen_key < node.gen_key:
                return None
        once = set(node.once)
        acts = []
        cons = list(node.constraints)
        new_cons = False
        end = False
        paired = node.paired
        for a in rule.actions:
            a = a.subst(sigma)
            if isinstance(a, Label):
                if a.name in self.once:
                    k = (a.name, a.args if self.once[a.name] else ())
                    if k in once:
                        return None
                    once.add(k)
                if a.name == "End":
                    end = True
                for pr in self.paired:
                    if a.name in (pr.left, pr.right):
                        paired = paired + ((a.name, a.args),)
                        if not _paired_prefix_ok(paired, pr):
                            return None
                acts.append(a)
            elif isinstance(a, (PredEq, PredNeq)):
                d = decide_pred(a)
                if d is False:
                    return None
                if d is None:
                    c = NumConstraint("eq" if isinstance(a, PredEq) else "neq", a.lhs, a.rhs)
                    cons.append(c)
                    new_cons = True
                acts.append(a)
            elif isinstance(a, NumFact):
                t = trivial(a.constraint)
                if t is False:
                    return None
                if t is None:
                    cons.append(a.constraint)
                    new_cons = True
                acts.append(a)
            elif isinstance(a, AnyOf):
                opts = []
                for c in a.options:
                    t = trivial(c)
                    if t is True:
                        opts = None
                        break
                    if t is None:
                        opts.append(c)
                if opts is not None:
                    if not opts:
                        return None
                    cons.append(AnyOf(tuple(opts)))
                acts.append(a)
            else:
                acts.append(a)
        prem = [f.subst(sigma) for f in ri.matched]
        concl = [f.subst(sigma) for f in rule.conclusion]
        for f in concl:
            if f.name.startswith("Call_") and f.name.endswith("in") and len(f.args) > 3:
                d = f.args[3]
                if isinstance(d, Const) and d.value > cfg.call_depth_cap:
                    return None
        state = node.state.replace(prem, concl)
        child = _Node(state, max(node.phase, ri.phase), gen_key,
                      node.tx + (1 if ri.generator else 0), node.users + new_users,
                      frozenset(once), node.actions + tuple(acts),
                      node.trail + ((ri, dict(sigma)),), frozenset(names), tuple(cons), paired)
        if new_cons and self.feasible is not None:
            key = frozenset(cons)
            ok = self._feasible_memo.get(key)
            if ok is None:
                ok = self._feasible_memo[key] = self.feasible(tuple(cons)) is not False
            if not ok:
                self.stats.pruned_infeasible += 1
                return None
        return child, end

    # ------------------------------------------------------------ driver

    def successors(self, node: _Node):
        for ri in self._candidates(node):
            for sigma in self._matches(node.state, ri.matched):
                for s, new_users in self._choices(ri, sigma, node):
                    got = self._fire(node, ri, dict(s), new_users)
                    if got is not None:
                        yield got

    def _complete(self, node: _Node) -> bool:
        # every generated transaction ran to completion (leftover calls only
        # duplicate a trace with fewer generator steps)
        for f in node.state.counts:
            if f.name in _CALLS or any(is_inflight(f.name, s) for s in SIDES):
                return False
        for pr in self.paired:
            left = Counter(args for n, args in node.paired if n == pr.left)
            right = Counter(args for n, args in node.paired if n == pr.right)
            if left != right:
                return False
        return True

    def traces(self):
        """Yield (Execution, signature) for every End-reaching trace in the bound."""
        yielded = set()
        for limit in self.cfg.depth_schedule():
            self.stats.iterations += 1
            self.stats.depth_cut = False
            visited: dict = {}
            root = _Node(State())
            yield from self._dfs(root, limit, visited, yielded)
            if not self.stats.depth_cut:
                self.stats.complete = True
                return
        self.stats.complete = False

    def _dfs(self, node, budget, visited, yielded):
        self._check_time()
        for child, end in self.successors(node):
            if end:
                if not self._complete(child):
                    continue
                sig = signature(child.trail)
                if sig in yielded or BlockingClause(sig) in self.blocked:
                    continue
                yielded.add(sig)
                self.stats.traces += 1
                yield build_execution(child.trail), sig
                continue
            if budget <= 1:
                self.stats.depth_cut = True
                continue
            k = child.key()
            if visited.get(k, -1) >= budget - 1:
                continue
            visited[k] = budget - 1
            yield from self._dfs(child, budget - 1, visited, yielded)


def _match_fact(pat, f, sigma):
    if pat.name != f.name or len(pat.args) != len(f.args):
        return None
    s = sigma
    for p, t in zip(pat.args, f.args):
        if isinstance(p, Var):
            if p.sort != t.sort:
                return None
            b = s.get(p)
            if b is None:
                if s is sigma:
                    s = dict(sigma)
                s[p] = t
            elif b != t:
                return None
        elif p != t:
            return None
    return s


def _inflight(state: State, side: str) -> bool:
    return any(is_inflight(f.name, side) for f in state.counts)


def _paired_prefix_ok(paired, pr) -> bool:
    """Copy B may only run transactions that copy A already ran."""
    left = Counter(args for n, args in paired if n == pr.left)
    right = Counter(args for n, args in paired if n == pr.right)
    return all(right[k] <= left[k] for k in right)


def signature(trail) -> tuple:
    out = []
    for ri, sigma in trail:
        binds = tuple(sorted((v.name, render(t)) for v, t in sigma.items()
                             if t.sort != Sort.MAP))
        out.append((ri.rule.meta.get("uid", ri.rule.name), binds))
    return tuple(out)


def build_execution(trail) -> Execution:
    """Replay the trail through the engine, recording Fresh and rule steps."""
    ex = Execution(State())
    st = ex.initial
    for ri, sigma in trail:
        steps = fire(st, ri.rule, sigma)
        ex.steps.extend(steps)
        st = steps[-1].state
    return ex


def search_end(model, cfg: SearchConfig | None = None, blocked=None, deadline=None):
    """First End-reaching, restriction-respecting, non-blocked trace, or None."""
    cfg = cfg or SearchConfig()
    if deadline is None:
        deadline = time.monotonic() + cfg.timeout
    s = Searcher(model, cfg, blocked, deadline)
    for ex, _ in s.traces():
        return ex, collect_constraints(ex, cfg.value_domain)
    return None
