"""Interactive proof engine for intuitionistic FOL with equality, where
proof steps are subformula clicks and drag-and-drops between items."""

from .parser import parse_formula, parse_problem, print_formula
from .state import ProofState, Trace, initial_state, replay

__version__ = "0.1.0"

__all__ = [
    "ProofState",
    "Trace",
    "initial_state",
    "parse_formula",
    "parse_problem",
    "print_formula",
    "replay",
]
