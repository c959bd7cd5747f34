"""Arrow update logic with arbitrary arrow update quantification.

Formulas, Kripke models, arrow update and action model execution, the
reduction to basic modal logic, synthesis of arrow updates, and the
translations between arrow updates and action models.
"""

from .conversion import (
    action_to_arrow, arrow_to_action, attentive_update, lying_action_model,
    sceptical_update,
)
from .equivalence import bisimilar, n_bisimilar, refines, update_equivalent_bounded
from .kripke import (
    ActionModel, KripkeModel, PointedAction, enumerate_models, execute_action_model,
    execute_arrow_update, mc, prune_unreachable,
)
from .normal import dnnf, simplify
from .parser import ParseError, parse_formula
from .reduction import RewriteTrace, reduce, reduce_quantifier, reduce_update
from .syntax import (
    Arrow, ArrowUpdateModel, Formula, PointedUpdate, modal_depth, substitute, to_text,
)
from .synthesis import optimize, synthesize

print_formula = to_text

__all__ = [
    "action_to_arrow", "arrow_to_action", "attentive_update", "lying_action_model",
    "sceptical_update", "bisimilar", "n_bisimilar", "refines", "update_equivalent_bounded",
    "ActionModel", "KripkeModel", "PointedAction", "enumerate_models",
    "execute_action_model", "execute_arrow_update", "mc", "prune_unreachable", "dnnf",
    "simplify", "ParseError", "parse_formula", "RewriteTrace", "reduce",
    "reduce_quantifier", "reduce_update", "Arrow", "ArrowUpdateModel", "Formula",
    "PointedUpdate", "modal_depth", "substitute", "to_text", "optimize", "synthesize",
    "print_formula",
]
