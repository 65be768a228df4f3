"""Compile quantified answer set programs to QBF and solve them."""

from .model import (
    Atom,
    ChoiceHead,
    Level,
    Literal,
    PartialInterpretation,
    Program,
    QuantifiedProgram,
    Quantifier,
    Rule,
    SymbolTable,
    desugar,
    fix,
    herbrand_base,
    interface_atoms,
    prefix_union,
)
from .textio import ParseError, parse, render

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ChoiceHead",
    "Level",
    "Literal",
    "ParseError",
    "PartialInterpretation",
    "Program",
    "QuantifiedProgram",
    "Quantifier",
    "Rule",
    "SymbolTable",
    "desugar",
    "fix",
    "herbrand_base",
    "interface_atoms",
    "parse",
    "prefix_union",
    "render",
]
