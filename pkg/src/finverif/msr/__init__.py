"""Labelled multiset rewriting: terms, facts, rules, states and executions."""
from .engine import (EMPTY, Execution, NotApplicable, State, Step, apply_rule,
                     enumerate_applicable, fire, instantiate, match_premises)
from .facts import (AnyOf, Fact, Label, NumConstraint, NumFact, PredEq, PredNeq,
                    PropCheck, decide_pred)
from .restrictions import OnceLabel, PairedLabels, PredicatesHold, check_restrictions
from .rules import FR, Rule, alpha_normalize, dump_rule, dump_rules, fr
from .terms import (EXT, IN, UINT_MOD, App, Const, Fresh, InitRead, MapVal, Select,
                    Sort, SortMismatch, Store, Term, Var, addr, app, fn_name, num,
                    render, select, store, substitute, tag)
from .tuples import EN, EY, RG, RL, RO, TC, TV, TupleSeq, VarTuple

__all__ = [n for n in dir() if not n.startswith("_")]
