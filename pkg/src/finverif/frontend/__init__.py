"""Solidity-subset frontend: lexing, parsing, loop unrolling, support checks."""
from . import ast
from .errors import (BoundExceeded, Diagnostic, FrontendError, SolSyntaxError,
                     UnboundedLoop, UnsupportedFeature)
from .parser import parse_contract, parse_source
from .pretty import pretty_contract, pretty_source
from .support import check_support
from .unroll import has_loops, unroll_loops

__all__ = [
    "ast", "BoundExceeded", "Diagnostic", "FrontendError", "SolSyntaxError",
    "UnboundedLoop", "UnsupportedFeature", "parse_contract", "parse_source",
    "pretty_contract", "pretty_source", "check_support", "has_loops", "unroll_loops",
]
