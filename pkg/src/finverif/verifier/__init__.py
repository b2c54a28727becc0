"""Bounded verification of complementary models."""
from .config import SearchConfig
from .constraints import (ConstraintSet, address_choices, collect_constraints, holds,
                          property_constraints)
from .search import BlockingClause, Searcher, SearchStats, SearchTimeout, search_end, signature
from .solver import SolveResult, solve
from .verify import UNKNOWN, VALID, VIOLATED, Verdict, verify
from .witness import Concretizer, check_witness, replay

__all__ = [
    "SearchConfig", "ConstraintSet", "address_choices", "collect_constraints", "holds", "property_constraints",
    "BlockingClause", "Searcher", "SearchStats", "SearchTimeout", "search_end", "signature",
    "SolveResult", "solve", "UNKNOWN", "VALID", "VIOLATED", "Verdict", "verify",
    "Concretizer", "check_witness", "replay",
]
