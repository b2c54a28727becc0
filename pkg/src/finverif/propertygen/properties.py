"""Property values produced by property generation."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class ContractCategory(Enum):
    ETHER_RELATED = "EtherRelated"
    TOKEN_CONTRACT = "TokenContract"
    TOKEN_MANAGING = "TokenManaging"
    INDIRECT_RELATED = "IndirectRelated"
    OTHER = "Other"


@dataclass(frozen=True)
class KeyVariables:
    balances_vars: tuple = ()
    total_supply: Optional[str] = None
    user_overrides: Optional[tuple] = None


@dataclass(frozen=True)
class IndexTerm:
    """A balance index written (or named) in one function: `var[keys]`."""
    contract: str
    function: str
    keys: tuple  # frontend expressions
    text: str

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class Invariant:
    """Sum of the balances at the index terms is preserved by every transaction.

    The right-hand side is the total-supply global when present, the fixed
    constant of a custom invariant, or else the initial sum itself.
    """
    contract: str
    var: str
    terms: tuple
    total_supply: Optional[str] = None
    constant: Optional[int] = None
    custom: bool = False

    kind = "invariant"

    @property
    def name(self) -> str:
        return f"token_inv({self.var})"

    @property
    def rhs(self) -> str:
        if self.total_supply:
            return self.total_supply
        return str(self.constant) if self.constant is not None else "C1"

    def describe(self) -> str:
        lhs = " + ".join(t.text for t in self.terms)
        return f"{lhs} == {self.rhs}"

    def terms_of(self, contract: str, function: str) -> list:
        if self.custom:
            return list(self.terms)
        return [t for t in self.terms if t.contract == contract and t.function == function]


@dataclass(frozen=True)
class Equivalence:
    """The adversary ends with the same balances after any two orderings."""
    contract: str
    token_vars: tuple = ()  # (contract, var) pairs
    ether: bool = True

    kind = "equivalence"

    @property
    def name(self) -> str:
        return "equivalence"

    def describe(self) -> str:
        parts = [f"{v}_A(c_adv) == {v}_B(c_adv)" for _, v in self.token_vars]
        if self.ether:
            parts.append("balance_A(c_adv) == balance_B(c_adv)")
        return " && ".join(parts)


class NoPropertyApplicable(Exception):
    pass


@dataclass
class ContractProfile:
    """Classification result for one contract."""
    name: str
    categories: set = field(default_factory=set)
    key_vars: KeyVariables = field(default_factory=KeyVariables)
