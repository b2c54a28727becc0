"""Terms of the rewriting models.

Rule patterns use `Var`; ground states use `Const`, `Fresh` and the
numeric/map compound terms built over them.  Compound terms are normalized
on construction: constant arithmetic folds (mod 2^256), and reads/writes on
ground maps with ground keys resolve immediately, so two ground terms with
the same value shape are structurally equal.
"""
from __future__ import annotations

from enum import Enum

UINT_BITS = 256
UINT_MOD = 2 ** UINT_BITS


class Sort(Enum):
    NUM = "Num"
    ADDR = "Addr"
    FN = "FnName"
    TAG = "Tag"
    MAP = "Map"


class SortMismatch(Exception):
    pass


class Term:
    __slots__ = ("_hash", "_key")
    sort: Sort

    def __eq__(self, other):
        return self is other or (type(self) is type(other) and self._fields() == other._fields())

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((type(self).__name__,) + self._fields())
        return h

    def __lt__(self, other):
        return self.key < other.key

    @property
    def key(self) -> str:
        k = self._key
        if k is None:
            k = self._key = f"{type(self).__name__}:{render(self)}"
        return k

    def __repr__(self):
        return render(self)

    def _fields(self) -> tuple:
        raise NotImplementedError


class Const(Term):
    __slots__ = ("value", "sort")

    def __init__(self, value, sort: Sort):
        self.value = value
        self.sort = sort
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.value, self.sort)


class Var(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort = Sort.NUM):
        self.name = name
        self.sort = sort
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.name, self.sort)


class Fresh(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort = Sort.NUM):
        self.name = name
        self.sort = sort
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.name, self.sort)


# Program arithmetic is modular; `sum` is exact integer addition used only by
# property formulas (so wraparound in balances is observable there).
OPS = {"add": "⊕", "sub": "⊖", "mul": "⊗", "div": "⊘", "mod": "mod", "pow": "pow",
       "sum": "+"}


class App(Term):
    __slots__ = ("op", "args")
    sort = Sort.NUM

    def __init__(self, op: str, args: tuple):
        if op not in OPS:
            raise ValueError(op)
        self.op = op
        self.args = tuple(args)
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.op, self.args)


class Select(Term):
    """Read `m[k1]...[kn]` (pattern level or unresolved)."""
    __slots__ = ("map", "keys")
    sort = Sort.NUM

    def __init__(self, map_: Term, keys: tuple):
        self.map = map_
        self.keys = tuple(keys)
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.map, self.keys)


class Store(Term):
    """Write `m[k1]...[kn] := v` (pattern level or unresolved)."""
    __slots__ = ("map", "keys", "value")
    sort = Sort.MAP

    def __init__(self, map_: Term, keys: tuple, value: Term):
        self.map = map_
        self.keys = tuple(keys)
        self.value = value
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.map, self.keys, self.value)


class InitRead(Term):
    """Initial value of a map slot: the leaf symbol `m0[k]`."""
    __slots__ = ("base", "keys")
    sort = Sort.NUM

    def __init__(self, base: Fresh, keys: tuple):
        self.base = base
        self.keys = tuple(keys)
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.base, self.keys)


class MapVal(Term):
    """Ground map: a fresh base map overlaid with written entries."""
    __slots__ = ("base", "entries")
    sort = Sort.MAP

    def __init__(self, base: Fresh, entries: tuple = ()):
        self.base = base
        self.entries = tuple(sorted(entries, key=lambda kv: tuple(k.key for k in kv[0])))
        self._hash = None
        self._key = None

    def _fields(self):
        return (self.base, self.entries)

    def get(self, keys: tuple) -> Term:
        for k, v in self.entries:
            if k == keys:
                return v
        return InitRead(self.base, keys)

    def set(self, keys: tuple, value: Term) -> "MapVal":
        entries = [(k, v) for k, v in self.entries if k != keys]
        if value != InitRead(self.base, keys):
            entries.append((keys, value))
        return MapVal(self.base, tuple(entries))


# ------------------------------------------------------------------ helpers

def num(v: int) -> Const:
    return Const(v % UINT_MOD if v >= 0 else v, Sort.NUM)


def addr(name: str) -> Const:
    return Const(name, Sort.ADDR)


def fn_name(name: str) -> Const:
    return Const(name, Sort.FN)


def tag(name: str) -> Const:
    return Const(name, Sort.TAG)


EXT = tag("EXT")
IN = tag("IN")


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, (Const, Fresh)):
        return True
    if isinstance(t, App):
        return all(is_ground(a) for a in t.args)
    if isinstance(t, Select):
        return is_ground(t.map) and all(is_ground(k) for k in t.keys)
    if isinstance(t, Store):
        return is_ground(t.map) and all(is_ground(k) for k in t.keys) and is_ground(t.value)
    if isinstance(t, InitRead):
        return all(is_ground(k) for k in t.keys)
    if isinstance(t, MapVal):
        return all(is_ground(v) for _, v in t.entries)
    raise TypeError(t)


def term_vars(t: Term, out: set | None = None) -> set:
    out = set() if out is None else out
    if isinstance(t, Var):
        out.add(t)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, out)
    elif isinstance(t, Select):
        term_vars(t.map, out)
        for k in t.keys:
            term_vars(k, out)
    elif isinstance(t, Store):
        term_vars(t.map, out)
        for k in t.keys:
            term_vars(k, out)
        term_vars(t.value, out)
    return out


def fresh_leaves(t: Term, out: set | None = None) -> set:
    """Num-sorted unknowns of a ground term (Fresh symbols and initial map reads)."""
    out = set() if out is None else out
    if isinstance(t, Fresh):
        if t.sort == Sort.NUM:
            out.add(t)
    elif isinstance(t, InitRead):
        out.add(t)
    elif isinstance(t, App):
        for a in t.args:
            fresh_leaves(a, out)
    elif isinstance(t, Select):
        fresh_leaves(t.map, out)
    elif isinstance(t, MapVal):
        for _, v in t.entries:
            fresh_leaves(v, out)
    return out


def fold_op(op: str, vals: list):
    """Concrete semantics of a numeric operator; None when undefined (zero divisor)."""
    if op == "sum":
        return sum(vals)
    a, b = vals
    if op == "add":
        return (a + b) % UINT_MOD
    if op == "sub":
        return (a - b) % UINT_MOD
    if op == "mul":
        return (a * b) % UINT_MOD
    if op == "div":
        return None if b == 0 else a // b
    if op == "mod":
        return None if b == 0 else a % b
    if op == "pow":
        return pow(a, b, UINT_MOD)
    raise ValueError(op)


def app(op: str, *args: Term) -> Term:
    """Smart constructor: folds constant arguments."""
    if all(isinstance(a, Const) and a.sort == Sort.NUM for a in args):
        v = fold_op(op, [a.value for a in args])
        if v is not None:
            return Const(v, Sort.NUM)
    return App(op, args)


def _ground_key(k: Term) -> bool:
    return isinstance(k, Const)


def select(m: Term, keys: tuple) -> Term:
    if isinstance(m, MapVal) and all(_ground_key(k) for k in keys):
        return m.get(tuple(keys))
    return Select(m, keys)


def store(m: Term, keys: tuple, value: Term) -> Term:
    if isinstance(m, MapVal) and all(_ground_key(k) for k in keys):
        return m.set(tuple(keys), value)
    return Store(m, keys, value)


def substitute(t: Term, sigma: dict) -> Term:
    if isinstance(t, Var):
        return sigma.get(t, t)
    if isinstance(t, (Const, Fresh, InitRead)):
        return t
    if isinstance(t, App):
        return app(t.op, *(substitute(a, sigma) for a in t.args))
    if isinstance(t, Select):
        return select(substitute(t.map, sigma), tuple(substitute(k, sigma) for k in t.keys))
    if isinstance(t, Store):
        return store(substitute(t.map, sigma), tuple(substitute(k, sigma) for k in t.keys),
                     substitute(t.value, sigma))
    if isinstance(t, MapVal):
        return t
    raise TypeError(t)


def evaluate(t: Term, model: dict, maps: dict | None = None):
    """Concrete value of a ground Num/Addr term under `model`.

    `model` maps Fresh / InitRead leaves to integers.  Raises ZeroDivisionError
    on an undefined division so callers can treat it as a revert.
    """
    if isinstance(t, Const):
        return t.value
    if isinstance(t, (Fresh, InitRead)):
        return model[t]
    if isinstance(t, App):
        vals = [evaluate(a, model) for a in t.args]
        v = fold_op(t.op, vals)
        if v is None:
            raise ZeroDivisionError(render(t))
        return v
    raise TypeError(f"cannot evaluate {render(t)}")


# ------------------------------------------------------------------ rendering

def render(t: Term) -> str:
    if isinstance(t, Const):
        if t.sort == Sort.NUM:
            return f"σa({t.value})"
        return f"σa({t.value})"
    if isinstance(t, Var):
        return f"σv({t.name})"
    if isinstance(t, Fresh):
        return f"~{t.name}"
    if isinstance(t, App):
        if t.op == "sum":
            return "(" + " + ".join(render(a) for a in t.args) + ")" if t.args else "σa(0)"
        return f"({render(t.args[0])} {OPS[t.op]} {render(t.args[1])})"
    if isinstance(t, Select):
        return render(t.map) + "".join(f"[{render(k)}]" for k in t.keys)
    if isinstance(t, Store):
        ks = "".join(f"[{render(k)}]" for k in t.keys)
        return f"{render(t.map)}{{{ks} := {render(t.value)}}}"
    if isinstance(t, InitRead):
        return f"~{t.base.name}" + "".join(f"[{short(k)}]" for k in t.keys)
    if isinstance(t, MapVal):
        if not t.entries:
            return f"~{t.base.name}"
        inner = ", ".join("".join(f"[{short(k)}]" for k in ks) + f"={render(v)}"
                          for ks, v in t.entries)
        return f"~{t.base.name}{{{inner}}}"
    raise TypeError(t)


def short(t: Term) -> str:
    """Compact rendering used inside solver names and witnesses."""
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Fresh):
        return t.name
    if isinstance(t, InitRead):
        return t.base.name + "".join(f"[{short(k)}]" for k in t.keys)
    return render(t)
