"""Quantifier elimination and sandbox models for generic vector-space expansions."""

from .config import EngineConfig, default_config, sqrt2_config
from .exactnum import FieldElem, FieldSpec, RingSpec
from .formulas import parse, parse_term, print_formula
from .qe import decide_sentence, eliminate_all, eliminate_one, replay
from .sandbox import eval_qfree, load_model, new_model, witness

__all__ = [
    "EngineConfig",
    "FieldElem",
    "FieldSpec",
    "RingSpec",
    "decide_sentence",
    "default_config",
    "eliminate_all",
    "eliminate_one",
    "eval_qfree",
    "load_model",
    "new_model",
    "parse",
    "parse_term",
    "print_formula",
    "replay",
    "sqrt2_config",
    "witness",
]

__version__ = "0.1.0"
