"""First-order logic with generalized quantifiers over finite structures: games, types and synthesis."""

from .caps import DEFAULT_CAPS, Caps
from .ef_game import EFOutcome, reference_winner, solve_ef
from .errors import CapExceeded, EFQError, InputError, ParseError
from .formulas import depth, evaluate, extension, free_vars, parse, size, to_text, trace
from .oracle import (min_separating_size, separable_at_depth, separates, weak_vs_strong_report)
from .quantifiers import (Quantifier, QuantifierSet, builtin, check_iso_invariance, custom_monadic,
                          custom_quantifier, q_accepts)
from .size_games import (ClassPosition, PairPosition, min_winning_budget, solve_class_game, solve_pair_game,
                         solve_weak_game, weak_game_counterpair)
from .structures import Assignment, Context, Structure, Vocabulary, tuples_respecting
from .types_engine import closed_set_formula, d_equivalent, joint_partition, stabilization_depth, type_formula
from .workspace import Workspace

__all__ = [
    "Assignment", "CapExceeded", "Caps", "ClassPosition", "Context", "DEFAULT_CAPS", "EFOutcome", "EFQError",
    "InputError", "PairPosition", "ParseError", "Quantifier", "QuantifierSet", "Structure", "Vocabulary",
    "Workspace", "builtin", "check_iso_invariance", "closed_set_formula", "custom_monadic", "custom_quantifier",
    "d_equivalent", "depth", "evaluate", "extension", "free_vars", "joint_partition", "min_separating_size",
    "min_winning_budget", "parse", "q_accepts", "reference_winner", "separable_at_depth", "separates", "size",
    "solve_class_game", "solve_ef", "solve_pair_game", "solve_weak_game", "stabilization_depth", "to_text",
    "trace", "tuples_respecting", "type_formula", "weak_game_counterpair", "weak_vs_strong_report",
]
