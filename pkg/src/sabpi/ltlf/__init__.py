"""LTLf parsing and DFA compilation."""
from .dfa import Dfa, StateBudgetExceeded, compile_dfa, compile_text
from .formula import Formula, is_core, normalize, to_nnf
from .parser import LtlfSyntaxError, UndeclaredAtomError, parse_ltlf
from .semantics import satisfies, satisfies_batch

__all__ = [
    "Dfa",
    "Formula",
    "LtlfSyntaxError",
    "StateBudgetExceeded",
    "UndeclaredAtomError",
    "compile_dfa",
    "compile_text",
    "is_core",
    "normalize",
    "parse_ltlf",
    "satisfies",
    "satisfies_batch",
    "to_nnf",
]
