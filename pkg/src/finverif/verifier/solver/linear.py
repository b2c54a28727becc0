"""Builtin solver for the collected constraints.

Terms are encoded into linear integer arithmetic: every wrapping operation
gets a result variable and a wrap counter (`r = a + b - 2^256 k`), division
and modulo by a constant get quotient/remainder variables.  Disequalities and
disjunctions are split lazily: only when the current model violates them.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from ...msr.terms import UINT_MOD, App, Const, Fresh, InitRead, Sort, render
from .simplex import Tableau

N = UINT_MOD


class Nonlinear(Exception):
    pass


class SolverTimeout(Exception):
    pass


@dataclass
class Lin:
    coefs: dict = field(default_factory=dict)
    const: int = 0

    def __add__(self, o):
        c = dict(self.coefs)
        for x, a in o.coefs.items():
            c[x] = c.get(x, 0) + a
        return Lin({x: a for x, a in c.items() if a}, self.const + o.const)

    def scale(self, k: int):
        return Lin({x: a * k for x, a in self.coefs.items()} if k else {}, self.const * k)

    def __sub__(self, o):
        return self + o.scale(-1)

    def shift(self, k: int):
        return Lin(dict(self.coefs), self.const + k)

    @property
    def is_const(self) -> bool:
        return not self.coefs


def var(x: int) -> Lin:
    return Lin({x: 1}, 0)


class Encoder:
    def __init__(self, tab: Tableau, domain: tuple, free=()):
        self.tab = tab
        self.domain = domain
        self.free = set(free)  # symbols without range bounds
        self.leaves: dict = {}
        self.memo: dict = {}

    def interval(self, e: Lin):
        lo = hi = e.const
        for x, a in e.coefs.items():
            l, u = self.tab.lb[x], self.tab.ub[x]
            if a < 0:
                l, u = u, l
            lo = None if lo is None or l is None else lo + a * l
            hi = None if hi is None or u is None else hi + a * u
        return lo, hi

    def leaf(self, t) -> Lin:
        x = self.leaves.get(t)
        if x is None:
            dom = (None, None) if t in self.free else self.domain
            x = self.leaves[t] = self.tab.add_var(*dom)
        return var(x)

    def equal(self, e: Lin):
        """Constrain e == 0."""
        s = self.tab.add_row(e.coefs, -e.const, -e.const)
        return s

    def lin(self, t) -> Lin:
        if isinstance(t, Const):
            if t.sort != Sort.NUM:
                raise Nonlinear(f"non-numeric term {render(t)}")
            return Lin({}, t.value)
        if isinstance(t, (Fresh, InitRead)):
            return self.leaf(t)
        if not isinstance(t, App):
            raise Nonlinear(f"cannot encode {render(t)}")
        got = self.memo.get(t)
        if got is None:
            got = self.memo[t] = self._app(t)
        return got

    def _wrapped(self, e: Lin, kmax: int) -> Lin:
        """Value of e reduced modulo 2^256, knowing 0 <= e < (kmax + 1) * 2^256."""
        lo, hi = self.interval(e)
        if lo is None or hi is None:
            raise Nonlinear("wrapping an unbounded value")
        if lo >= 0 and hi < N:
            return e
        if lo >= N * (hi // N) and hi // N == lo // N:
            return e.shift(-N * (lo // N))
        r = var(self.tab.add_var(0, N - 1))
        k = var(self.tab.add_var(max(0, lo // N), min(kmax, hi // N)))
        self.equal(r - e + k.scale(N))
        return r

    def _app(self, t: App) -> Lin:
        op = t.op
        if op == "sum":
            out = Lin()
            for a in t.args:
                out = out + self.lin(a)
            return out
        a, b = (self.lin(x) for x in t.args)
        if op == "add":
            return self._wrapped(a + b, 1)
        if op == "sub":
            return self._wrapped((a - b).shift(N), 1)
        if op == "mul":
            if b.is_const:
                a, b = b, a
            if not a.is_const:
                raise Nonlinear(f"product of two symbols: {render(t)}")
            c = a.const
            if c == 0:
                return Lin()
            _, hi = self.interval(b)
            if hi is None:
                raise Nonlinear("scaling an unbounded value")
            return self._wrapped(b.scale(c), max(0, (c * hi) // N))
        if op in ("div", "mod"):
            if not b.is_const:
                raise Nonlinear(f"division by a symbol: {render(t)}")
            c = b.const
            if c == 0:
                raise Nonlinear("division by zero")
            key = ("divmod", t.args)
            qm = self.memo.get(key)
            if qm is None:
                _, hi = self.interval(a)
                if hi is None:
                    raise Nonlinear("dividing an unbounded value")
                q = var(self.tab.add_var(0, max(0, hi) // c))
                m = var(self.tab.add_var(0, c - 1))
                self.equal(a - q.scale(c) - m)
                qm = self.memo[key] = (q, m)
            return qm[0] if op == "div" else qm[1]
        if op == "pow":
            if b.is_const and b.const in (0, 1):
                return Lin({}, 1) if b.const == 0 else a
            raise Nonlinear(f"non-constant power: {render(t)}")
        raise Nonlinear(op)


# an alternative is (lin expr e, lo, hi): lo <= e <= hi
def alternatives(enc: Encoder, c) -> list:
    e = enc.lin(c.lhs) - enc.lin(c.rhs)
    if c.rel == "eq":
        return [(e, 0, 0)]
    if c.rel == "le":
        return [(e, None, 0)]
    if c.rel == "lt":
        return [(e, None, -1)]
    return [(e, None, -1), (e, 1, None)]


@dataclass
class LinearResult:
    status: str  # sat / unsat / unknown
    model: dict = field(default_factory=dict)
    reason: str = ""


class _Search:
    def __init__(self, tab, enc, disjunctions, node_limit, deadline):
        self.tab = tab
        self.enc = enc
        self.disj = disjunctions
        self.nodes = node_limit
        self.pivots = [node_limit * 50]
        self.deadline = deadline
        self.slack: dict = {}

    def _value(self, e: Lin) -> Fraction:
        return sum((a * self.tab.val[x] for x, a in e.coefs.items()), Fraction(e.const))

    def _alt_holds(self, alt) -> bool:
        e, lo, hi = alt
        v = self._value(e)
        return (lo is None or v >= lo) and (hi is None or v <= hi)

    def _slack_for(self, alt):
        key = (tuple(sorted(alt[0].coefs.items())), )
        s = self.slack.get(key)
        if s is None:
            s = self.slack[key] = self.tab.add_row(alt[0].coefs)
        return s, alt[0].const

    def _branch_var(self):
        """Fractional integer variable with the narrowest bounds (wrap counters first)."""
        tab = self.tab
        best, width = None, None
        for x in range(len(tab.val)):
            if tab.integer[x] and tab.val[x].denominator != 1:
                lo, hi = tab.lb[x], tab.ub[x]
                w = hi - lo if lo is not None and hi is not None else math.inf
                if width is None or w < width:
                    best, width = x, w
        return best

    def run(self) -> bool:
        self.nodes -= 1
        if self.nodes < 0:
            raise SolverTimeout("branch-and-bound node limit")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout("deadline")
        if not self.tab.check(self.pivots):
            return False
        tab = self.tab
        x = self._branch_var()
        if x is not None:
            v = tab.val[x]
            fl = math.floor(v)
            old = (tab.lb[x], tab.ub[x])
            order = [(old[0], fl), (fl + 1, old[1])]
            if v - fl > Fraction(1, 2):
                order.reverse()
            for lo, hi in order:
                if (lo is not None and hi is not None and lo > hi):
                    continue
                tab.set_bounds(x, lo, hi)
                ok = self.run()
                if ok:
                    return True
                tab.set_bounds(x, *old)
            return False
        for d in self.disj:
            if any(self._alt_holds(a) for a in d):
                continue
            for alt in d:
                s, const = self._slack_for(alt)
                _, lo, hi = alt
                old = (tab.lb[s], tab.ub[s])
                nlo = None if lo is None else lo - const
                nhi = None if hi is None else hi - const
                if old[0] is not None:
                    nlo = old[0] if nlo is None else max(nlo, old[0])
                if old[1] is not None:
                    nhi = old[1] if nhi is None else min(nhi, old[1])
                if nlo is not None and nhi is not None and nlo > nhi:
                    continue
                tab.set_bounds(s, nlo, nhi)
                if self.run():
                    return True
                tab.set_bounds(s, *old)
            return False
        return True


def solve_linear(conjuncts, disjunctions, domain=(0, N - 1), node_limit=20000,
                 deadline=None, free=()) -> LinearResult:
    tab = Tableau()
    enc = Encoder(tab, domain, free)
    disj = []
    try:
        for c in conjuncts:
            alts = alternatives(enc, c)
            if len(alts) == 1:
                e, lo, hi = alts[0]
                elo, ehi = enc.interval(e)
                if (lo is not None and ehi is not None and ehi < lo) or \
                        (hi is not None and elo is not None and elo > hi):
                    return LinearResult("unsat", reason="bounds")
                if (lo is None or (elo is not None and elo >= lo)) and \
                        (hi is None or (ehi is not None and ehi <= hi)):
                    continue
                tab.add_row(e.coefs, None if lo is None else lo - e.const,
                            None if hi is None else hi - e.const)
            else:
                disj.append(alts)
        for d in disjunctions:
            alts = []
            for c in d:
                alts.extend(alternatives(enc, c))
            disj.append(alts)
    except Nonlinear as exc:
        return LinearResult("unknown", reason=f"nonlinear: {exc}")
    search = _Search(tab, enc, disj, node_limit, deadline)
    try:
        ok = search.run()
    except (SolverTimeout, TimeoutError) as exc:
        return LinearResult("unknown", reason=str(exc))
    except RecursionError:
        return LinearResult("unknown", reason="branch-and-bound too deep")
    if not ok:
        return LinearResult("unsat")
    model = {t: int(tab.val[x]) for t, x in enc.leaves.items()}
    return LinearResult("sat", model)
