"""LTLf-to-DFA conversion and reactive synthesis."""

from ._lisaforge import (
    BudgetExceeded,
    FormulaParseError,
    Synthesis,
    accepts,
    canonical,
    convert,
    dfa_dot,
    evaluate,
    generate,
    min_dfa_states,
    propositions,
)

__all__ = [
    "BudgetExceeded",
    "FormulaParseError",
    "Synthesis",
    "accepts",
    "canonical",
    "convert",
    "dfa_dot",
    "evaluate",
    "generate",
    "min_dfa_states",
    "propositions",
]
