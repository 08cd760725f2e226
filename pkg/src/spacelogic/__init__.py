"""Decision procedures for dynamic logics of the discrete plane.

Parse spatial and motion formulas, model check them over bounded grid
models, decide satisfiability for the star-free and position-only
fragments, reduce motion modalities away and probe axiom schemas.
"""

from __future__ import annotations

from .errors import (
    BoundednessError,
    BudgetExhausted,
    ParseError,
    SpaceLogicError,
    UnsupportedFragment,
)
from .modelcheck import bounded_bisim, check, check_naive, truth_table
from .models import (
    Gap,
    PositionModel,
    SpatialModel,
    apply_joint_action,
    find_gaps,
    parse_model,
    remove_gap,
    removal,
    render_model,
    truncate,
)
from .motion import check_motion, check_sees, expand_coalition, red, simulate
from .sat import SatResult, reduce_star_free, sat_positions, sat_star_free, satisfiable, validity
from .syntax import (
    modal_degree,
    parse_formula,
    parse_program,
    render_formula,
    render_program,
)

__version__ = "0.1.0"

__all__ = [
    "BoundednessError",
    "BudgetExhausted",
    "Gap",
    "ParseError",
    "PositionModel",
    "SatResult",
    "SpaceLogicError",
    "SpatialModel",
    "UnsupportedFragment",
    "apply_joint_action",
    "bounded_bisim",
    "check",
    "check_motion",
    "check_naive",
    "check_sees",
    "expand_coalition",
    "find_gaps",
    "modal_degree",
    "parse_formula",
    "parse_model",
    "parse_program",
    "red",
    "reduce_star_free",
    "removal",
    "remove_gap",
    "render_formula",
    "render_model",
    "render_program",
    "sat_positions",
    "sat_star_free",
    "satisfiable",
    "simulate",
    "truncate",
    "truth_table",
    "validity",
]
