"""Contract language front end: parsing, static checks and elaboration."""

from .ast import ContractAst
from .elaborate import elaborate, load_problem
from .parser import parse_contract
from .problem import SymbolRef, SynthesisProblem, input_var, next_var, parse_symbol

__all__ = [
    "ContractAst",
    "SymbolRef",
    "SynthesisProblem",
    "elaborate",
    "input_var",
    "load_problem",
    "next_var",
    "parse_contract",
    "parse_symbol",
]
