"""Bounded general simplex over exact rationals (Bland's rule)."""
from __future__ import annotations

from fractions import Fraction


class Tableau:
    def __init__(self):
        self.lb: list = []
        self.ub: list = []
        self.val: list = []
        self.rows: dict = {}        # basic var -> {nonbasic var: coef}
        self.integer: list = []

    def add_var(self, lo=None, hi=None, integer=True) -> int:
        i = len(self.val)
        self.lb.append(lo)
        self.ub.append(hi)
        v = 0
        if lo is not None and v < lo:
            v = lo
        if hi is not None and v > hi:
            v = hi
        self.val.append(Fraction(v))
        self.integer.append(integer)
        return i

    def add_row(self, coefs: dict, lo=None, hi=None) -> int:
        """New basic slack s = sum(coef * x); returns s."""
        row: dict = {}
        for x, a in coefs.items():
            if a == 0:
                continue
            if x in self.rows:
                for y, b in self.rows[x].items():
                    row[y] = row.get(y, 0) + a * b
            else:
                row[x] = row.get(x, 0) + a
        row = {y: Fraction(a) for y, a in row.items() if a != 0}
        s = len(self.val)
        self.lb.append(lo)
        self.ub.append(hi)
        self.val.append(sum((a * self.val[y] for y, a in row.items()), Fraction(0)))
        self.integer.append(False)
        self.rows[s] = row
        return s

    def set_bounds(self, x: int, lo, hi):
        self.lb[x], self.ub[x] = lo, hi
        if x not in self.rows:
            v = self.val[x]
            if lo is not None and v < lo:
                self._update(x, Fraction(lo))
            elif hi is not None and v > hi:
                self._update(x, Fraction(hi))

    def _update(self, x: int, v: Fraction):
        d = v - self.val[x]
        self.val[x] = v
        for b, row in self.rows.items():
            a = row.get(x)
            if a:
                self.val[b] += a * d

    def _pivot(self, b: int, n: int):
        row = self.rows.pop(b)
        a = row.pop(n)
        # n = (b - sum(row)) / a
        new = {y: -c / a for y, c in row.items()}
        new[b] = 1 / a
        self.rows[n] = new
        for k, r in self.rows.items():
            if k == n:
                continue
            c = r.pop(n, None)
            if c:
                for y, e in new.items():
                    t = r.get(y, 0) + c * e
                    if t:
                        r[y] = t
                    else:
                        r.pop(y, None)

    def check(self, budget: list) -> bool:
        """Find an assignment within all bounds; False when infeasible."""
        while True:
            budget[0] -= 1
            if budget[0] < 0:
                raise TimeoutError("simplex pivot limit")
            bad = None
            for b in sorted(self.rows):
                v = self.val[b]
                if (self.lb[b] is not None and v < self.lb[b]) or \
                        (self.ub[b] is not None and v > self.ub[b]):
                    bad = b
                    break
            if bad is None:
                return True
            row = self.rows[bad]
            v = self.val[bad]
            low = self.lb[bad] is not None and v < self.lb[bad]
            target = Fraction(self.lb[bad] if low else self.ub[bad])
            pick = None
            for n in sorted(row):
                a = row[n]
                up_ok = self.ub[n] is None or self.val[n] < self.ub[n]
                down_ok = self.lb[n] is None or self.val[n] > self.lb[n]
                if low and ((a > 0 and up_ok) or (a < 0 and down_ok)):
                    pick = n
                    break
                if not low and ((a < 0 and up_ok) or (a > 0 and down_ok)):
                    pick = n
                    break
            if pick is None:
                return False
            a = row[pick]
            theta = (target - v) / a
            self.val[bad] = target
            self.val[pick] += theta
            for k, r in self.rows.items():
                if k != bad:
                    c = r.get(pick)
                    if c:
                        self.val[k] += c * theta
            self._pivot(bad, pick)
