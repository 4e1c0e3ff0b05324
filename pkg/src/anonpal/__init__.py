"""Anonymous public announcement logic on finite S5 models.

Models, a formula language with public, pseudo-anonymous and safe
anonymous announcements, an extension-based model checker for knowledge,
common knowledge and the safety operator, bisimulation, reductions to
static formulas and brute-force oracles.
"""

from anonpal.model import (
    AnnouncerTag, EpistemicModel, ModelError, PointedModel, are_bisimilar, bisim_classes,
    build_model, load_model, model_to_spec, restrict, save_model,
)
from anonpal.reduce import ReductionError, eliminate_safe, reduce_anon, reduce_pal, reduce_sai
from anonpal.semantics import common_ext, everyone_ext, extension, knows_ext, safe_ext, satisfies
from anonpal.syntax import Formula, FormulaSyntaxError, parse_formula, print_formula
from anonpal.updates import (
    ActionModel, anon_action_model, anon_update, audit_anonymity, product, product_update,
    public_update, safe_anon_update,
)

__version__ = "0.1.0"

__all__ = [
    "ActionModel", "AnnouncerTag", "EpistemicModel", "Formula", "FormulaSyntaxError",
    "ModelError", "PointedModel", "ReductionError", "anon_action_model", "anon_update",
    "are_bisimilar", "audit_anonymity", "bisim_classes", "build_model", "common_ext",
    "eliminate_safe", "everyone_ext", "extension", "knows_ext", "load_model", "model_to_spec",
    "parse_formula", "print_formula", "product", "product_update", "public_update",
    "reduce_anon", "reduce_pal", "reduce_sai", "restrict", "safe_anon_update", "safe_ext",
    "satisfies", "save_model",
]
