"""Facts and action labels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .terms import Const, Sort, Term, is_ground, render, substitute, term_vars


class Fact:
    """Linear fact `name(args)`; `tag` is the optional contract tag."""
    __slots__ = ("name", "args", "tag", "_hash", "_key")

    def __init__(self, name: str, args=(), tag: Optional[str] = None):
        self.name = name
        self.args = tuple(args)
        self.tag = tag
        self._hash = None
        self._key = None

    def __eq__(self, other):
        return self is other or (isinstance(other, Fact) and self.name == other.name
                                 and self.args == other.args and self.tag == other.tag)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = self._hash = hash((self.name, self.args, self.tag))
        return h

    @property
    def key(self) -> str:
        k = self._key
        if k is None:
            k = self._key = render_fact(self)
        return k

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return render_fact(self)

    def subst(self, sigma: dict) -> "Fact":
        return Fact(self.name, tuple(substitute(a, sigma) for a in self.args), self.tag)

    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def vars(self) -> set:
        out = set()
        for a in self.args:
            term_vars(a, out)
        return out


def render_fact(f: Fact) -> str:
    name = f"{f.name}^{f.tag}" if f.tag else f.name
    return f"{name}({', '.join(render(a) for a in f.args)})"


# ------------------------------------------------------------------ actions

REL_NAMES = {"eq": "EqNum", "neq": "NeqNum", "lt": "LessNum", "le": "LessEqNum"}
NEGATE = {"eq": "neq", "neq": "eq", "lt": "ge", "le": "gt"}


@dataclass(frozen=True)
class NumConstraint:
    """`lhs rel rhs` over Num terms, rel in eq/neq/lt/le."""
    rel: str
    lhs: Term
    rhs: Term

    def subst(self, sigma: dict) -> "NumConstraint":
        return NumConstraint(self.rel, substitute(self.lhs, sigma), substitute(self.rhs, sigma))

    def negate(self) -> "NumConstraint":
        if self.rel == "eq":
            return NumConstraint("neq", self.lhs, self.rhs)
        if self.rel == "neq":
            return NumConstraint("eq", self.lhs, self.rhs)
        if self.rel == "lt":  # not a < b  ==  b <= a
            return NumConstraint("le", self.rhs, self.lhs)
        return NumConstraint("lt", self.rhs, self.lhs)

    def __str__(self):
        return f"{REL_NAMES[self.rel]}({render(self.lhs)}, {render(self.rhs)})"


@dataclass(frozen=True)
class Label:
    name: str
    args: tuple = ()

    def subst(self, sigma):
        return Label(self.name, tuple(substitute(a, sigma) for a in self.args))

    def __str__(self):
        return f"{self.name}({', '.join(render(a) for a in self.args)})"


@dataclass(frozen=True)
class NumFact:
    constraint: NumConstraint

    def subst(self, sigma):
        return NumFact(self.constraint.subst(sigma))

    def __str__(self):
        return str(self.constraint)


@dataclass(frozen=True)
class AnyOf:
    """Disjunction of numeric constraints (negation of a conjunction)."""
    options: tuple

    def subst(self, sigma):
        return AnyOf(tuple(c.subst(sigma) for c in self.options))

    def __str__(self):
        return " | ".join(str(c) for c in self.options)


@dataclass(frozen=True)
class PredEq:
    lhs: Term
    rhs: Term

    def subst(self, sigma):
        return PredEq(substitute(self.lhs, sigma), substitute(self.rhs, sigma))

    def __str__(self):
        return f"Pred_eq({render(self.lhs)}, {render(self.rhs)})"


@dataclass(frozen=True)
class PredNeq:
    lhs: Term
    rhs: Term

    def subst(self, sigma):
        return PredNeq(substitute(self.lhs, sigma), substitute(self.rhs, sigma))

    def __str__(self):
        return f"Pred_neq({render(self.lhs)}, {render(self.rhs)})"


@dataclass(frozen=True)
class PropCheck:
    """Property placeholder resolved when constraints are collected.

    kind `inv_init` carries the initial balance maps; `inv_end` carries the
    final maps, the balance-index terms and the total-supply terms;
    `equ` carries the A-side and B-side watched terms.
    """
    kind: str
    args: tuple

    def subst(self, sigma):
        return PropCheck(self.kind, _subst_nested(self.args, sigma))

    def __str__(self):
        sym = {"inv_init": "θe(φ)", "inv_end": "θne(φ)", "equ": "θne(φ_equ)"}[self.kind]
        return sym


def _subst_nested(x, sigma):
    if isinstance(x, tuple):
        return tuple(_subst_nested(y, sigma) for y in x)
    if isinstance(x, Term):
        return substitute(x, sigma)
    return x


def action_vars(a) -> set:
    out = set()

    def visit(x):
        if isinstance(x, Term):
            term_vars(x, out)
        elif isinstance(x, tuple):
            for y in x:
                visit(y)
        elif isinstance(x, NumConstraint):
            visit(x.lhs)
            visit(x.rhs)
        elif isinstance(x, (Label, PropCheck)):
            visit(x.args)
        elif isinstance(x, NumFact):
            visit(x.constraint)
        elif isinstance(x, AnyOf):
            visit(x.options)
        elif isinstance(x, (PredEq, PredNeq)):
            visit(x.lhs)
            visit(x.rhs)
    visit(a)
    return out


def decide_pred(a) -> Optional[bool]:
    """Truth of a ground Pred_eq/Pred_neq; None if it cannot be decided syntactically."""
    lhs, rhs = a.lhs, a.rhs
    if isinstance(lhs, Const) and isinstance(rhs, Const):
        same = lhs == rhs
    elif lhs == rhs:
        same = True
    elif lhs.sort in (Sort.ADDR, Sort.FN, Sort.TAG):
        # atoms of these sorts are always constants in ground states
        same = False
    else:
        return None
    return same if isinstance(a, PredEq) else not same
