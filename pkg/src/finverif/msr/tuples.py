"""Name tuples ⟨name, type, range, ether⟩ and ordered sequences of them."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .terms import Const, Term

TV, TC = "Tv", "Tc"
RG, RL, RO = "Rg", "Rl", "Ro"
EY, EN = "Ey", "En"


@dataclass(frozen=True)
class VarTuple:
    name: Term
    ty: str = TV
    range: str = RL
    ether: str = EN
    source: Optional[str] = None  # Solidity identifier this slot stands for

    def __post_init__(self):
        if self.ether == EY and self.range != RG:
            raise ValueError("ether balances are global")
        if self.ty == TC and not isinstance(self.name, Const):
            raise ValueError("a constant tuple needs a constant name")


@dataclass(frozen=True)
class TupleSeq:
    items: tuple = ()

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __add__(self, other: "TupleSeq") -> "TupleSeq":
        return TupleSeq(self.items + tuple(other.items))

    def __getitem__(self, j: int) -> Term:
        """1-based index returning the j-th name term."""
        if j < 1:
            raise IndexError(j)
        return self.items[j - 1].name

    def append(self, t: VarTuple) -> "TupleSeq":
        return TupleSeq(self.items + (t,))

    def sigma(self) -> list:
        return [t.name for t in self.items]

    def g(self) -> list:
        return [t.name for t in self.items if t.range == RG]

    def e(self) -> list:
        return [t.name for t in self.items if t.ether == EY]

    def g_minus_e(self) -> list:
        return [t.name for t in self.items if t.range == RG and t.ether != EY]

    def l(self) -> list:
        return [t.name for t in self.items if t.range == RL]

    def without_globals(self) -> list:
        """σ(ω) minus g(ω), keeping order."""
        return [t.name for t in self.items if t.range != RG]

    def replace_name(self, old: Term, new: Term) -> "TupleSeq":
        """ω|old/new| on the name component."""
        return TupleSeq(tuple(replace(t, name=new) if t.name == old else t for t in self.items))

    def position(self, source: str) -> Optional[int]:
        """0-based slot of the latest binding of a Solidity identifier."""
        for k in range(len(self.items) - 1, -1, -1):
            if self.items[k].source == source:
                return k
        return None
