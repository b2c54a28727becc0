"""Contract classification and property generation."""
from .generate import (BALANCE_NAMES, DEFAULT_THRESHOLD, classify, classify_unit,
                       find_key_variables, generate_properties, is_ether_related,
                       parse_custom_invariant, written_index_terms)
from .properties import (ContractCategory, ContractProfile, Equivalence, IndexTerm, Invariant,
                         KeyVariables, NoPropertyApplicable)
from .similarity import name_similarity, ratio, token_key

__all__ = [
    "BALANCE_NAMES", "DEFAULT_THRESHOLD", "classify", "classify_unit", "find_key_variables",
    "generate_properties", "is_ether_related", "parse_custom_invariant",
    "written_index_terms", "ContractCategory", "ContractProfile", "Equivalence", "IndexTerm",
    "Invariant", "KeyVariables", "NoPropertyApplicable", "name_similarity", "ratio",
    "token_key",
]
