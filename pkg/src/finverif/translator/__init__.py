"""Translation of parsed contracts into labelled multiset rewriting models."""
from .model import (IndependentModel, build_adversary_rules, build_independent_model,
                    dump_model, prepare_contract)
from .normalize import normalize_function
from .theta import Env, InternalError, UnsupportedExpr, theta, theta_o
from .translate import C_ADV, ContractInfo, build_omega0, contract_info, translate_function

__all__ = ["IndependentModel", "build_adversary_rules", "build_independent_model",
           "dump_model", "prepare_contract", "normalize_function", "Env", "InternalError",
           "UnsupportedExpr", "theta", "theta_o", "C_ADV", "ContractInfo", "build_omega0",
           "contract_info", "translate_function"]
