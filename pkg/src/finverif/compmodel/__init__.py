"""Complementary models: property violations become reachable End() states."""
from .equivalence import (PHASE_A, PHASE_B, PHASE_COMPARE, EquivalenceModel,
                          build_equivalence_model, compare_rule)
from .invariant import C1, InvariantModel, build_invariant_model, end_index_keys
from .naming import is_inflight, rename_fact, side_name, strip_side
from .timestamps import MINER_DRIFT, TimestampConstraintSet, index_timestamps

__all__ = [
    "PHASE_A", "PHASE_B", "PHASE_COMPARE", "EquivalenceModel", "build_equivalence_model",
    "compare_rule", "C1", "InvariantModel", "build_invariant_model", "end_index_keys",
    "is_inflight", "rename_fact", "side_name", "strip_side", "MINER_DRIFT",
    "TimestampConstraintSet", "index_timestamps",
]
