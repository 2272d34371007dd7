"""Satisfiability, model checking and translation toolkit for the
knowing-how modality over labelled transition systems."""

__version__ = "0.1.0"

from .errors import BudgetExceededError, ContractError, InternalSoundnessError
from .lts import (EMPTY_PLAN, LtsModel, ModelFormatError, Plan, apply_plan,
                  check_kh, model_check, strongly_executable)
from .oracle import OracleBounds, enumerate_models, fuzz, oracle_sat
from .s5 import GlobalAtom, S5Model, eval_global, s5_sat
from .sat import eval_prop, prop_sat
from .solver import (Branch, SatVerdict, UnsatVerdict, branch_atoms, decide,
                     extract_lts, state_bound, verdict_to_dict, verify)
from .syntax import (Atom, AtomConjunction, Formula, ParseError, desugar,
                     find_positive_atom, parse, substitute_atom, to_text)
from .translate import (DRelation, ThetaDisjunct, closure_complement,
                        enumerate_disjuncts, theta_d, theta_minus, theta_plus)

__all__ = [
    "Atom", "AtomConjunction", "Branch", "BudgetExceededError",
    "ContractError", "DRelation", "EMPTY_PLAN", "Formula", "GlobalAtom",
    "InternalSoundnessError", "LtsModel", "ModelFormatError", "OracleBounds",
    "ParseError", "Plan", "S5Model", "SatVerdict", "ThetaDisjunct",
    "UnsatVerdict", "apply_plan", "branch_atoms", "check_kh",
    "closure_complement", "decide", "desugar", "enumerate_disjuncts",
    "enumerate_models", "eval_global", "eval_prop", "extract_lts",
    "find_positive_atom", "fuzz", "model_check", "oracle_sat", "parse",
    "prop_sat", "s5_sat", "state_bound", "strongly_executable",
    "substitute_atom", "theta_d", "theta_minus", "theta_plus", "to_text",
    "verdict_to_dict", "verify",
]
